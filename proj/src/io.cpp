#include "coin/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace coin {

std::string sha256_hex(std::string_view bytes)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw Error("io", "SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string file_sha256(const std::filesystem::path& path)
{
    return sha256_hex(read_file(path));
}

std::string format_number(double v, int precision)
{
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

std::string OutputHeader::line() const
{
    return "# coin " + command + " config_hash=" + config_hash + " data_hash=" + data_hash;
}

void CsvTable::add_row(std::vector<std::string> cells)
{
    if (cells.size() != columns_.size()) throw Error("io", "CSV row width does not match the header");
    rows_.push_back(std::move(cells));
}

std::string CsvTable::render(const OutputHeader& header) const
{
    std::string out = header.line() + "\n";
    auto join = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    join(columns_);
    for (const auto& r : rows_) join(r);
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("io", "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("io", "failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("io", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

constexpr char kMagic[8] = {'C', 'O', 'I', 'N', 'D', 'R', 'A', 'W'};

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xffu);
}

std::uint32_t get_u32(const std::string& in, std::size_t at)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    return v;
}

void put_f64(std::string& out, double d)
{
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    for (int i = 0; i < 8; ++i) out += static_cast<char>((bits >> (8 * i)) & 0xffu);
}

double get_f64(const std::string& in, std::size_t at)
{
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
}

}  // namespace

std::string encode_draws(const Eigen::MatrixXd& draws, Horizon h)
{
    std::string out(kMagic, sizeof kMagic);
    put_u32(out, kDrawFileVersion);
    put_u32(out, static_cast<std::uint32_t>(draws.rows()));
    put_u32(out, static_cast<std::uint32_t>(draws.cols()));
    put_u32(out, h == Horizon::Quarterly ? 0u : 1u);
    for (Index t = 0; t < draws.cols(); ++t)
        for (Index b = 0; b < draws.rows(); ++b) put_f64(out, draws(b, t));
    return out;
}

DrawFile decode_draws(const std::string& bytes)
{
    constexpr std::size_t header = sizeof kMagic + 16;
    if (bytes.size() < header || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw DataError("io", "not a draw file");
    DrawFile f;
    f.version = get_u32(bytes, 8);
    if (f.version != kDrawFileVersion) throw DataError("io", "unsupported draw file version");
    const std::uint32_t B = get_u32(bytes, 12), T = get_u32(bytes, 16), h = get_u32(bytes, 20);
    if (h > 1) throw DataError("io", "bad horizon code in draw file");
    f.horizon = h == 0 ? Horizon::Quarterly : Horizon::Annual;
    if (bytes.size() != header + 8ull * B * T) throw DataError("io", "truncated draw file");
    f.draws.resize(B, T);
    std::size_t at = header;
    for (std::uint32_t t = 0; t < T; ++t)
        for (std::uint32_t b = 0; b < B; ++b, at += 8) f.draws(b, t) = get_f64(bytes, at);
    return f;
}

std::string fred_md_csv(const std::vector<std::string>& ids, const std::vector<int>& tcodes, const Eigen::MatrixXd& x,
                        const std::vector<YearMonth>& dates)
{
    std::string out = "sasdate";
    for (const auto& id : ids) out += "," + id;
    out += "\nTransform:";
    for (int c : tcodes) out += "," + std::to_string(c);
    out += '\n';
    for (Index t = 0; t < x.cols(); ++t) {
        const YearMonth d = dates[static_cast<std::size_t>(t)];
        out += std::to_string(d.month) + "/1/" + std::to_string(d.year);
        for (Index i = 0; i < x.rows(); ++i) out += "," + format_number(x(i, t), 17);
        out += '\n';
    }
    return out;
}

std::string quarterly_csv(const std::vector<YearMonth>& quarter_end, const Eigen::VectorXd& levels)
{
    std::string out = "observation_date,GDPC1\n";
    for (Index i = 0; i < levels.size(); ++i) {
        const YearMonth first = quarter_end[static_cast<std::size_t>(i)] - 2;
        out += first.str() + "-01," + format_number(levels(i), 17) + "\n";
    }
    return out;
}

}  // namespace coin
