#include "coin/cli.hpp"

int main(int argc, char** argv)
{
    return coin::run_cli(argc, argv);
}
