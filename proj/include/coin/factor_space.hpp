#pragma once

// Common and low-pass covariances from the spectral estimate, generalized eigenvectors of
// the (component, total) covariance pencil, and rank selection.

#include "coin/spectral.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace coin {

template <typename Scalar>
struct ComponentCovariances {
    Matrix<Scalar> gamma0_x;
    Matrix<Scalar> gamma0_chi;
    Matrix<Scalar> gamma0_phi;
    int q = 0;
    Scalar theta_c = Scalar(kPi / 6);
    int m_c = 0;
};

// Solution of the pencil (target, gamma0_x) restricted to the leading `rank` pairs.
template <typename Scalar>
struct GeneralizedEigs {
    Matrix<Scalar> Z;        // n x rank, Z' gamma0_x Z = I
    Vector<Scalar> M_star;   // descending, Z' target Z = diag(M_star)
    Matrix<Scalar> A;        // gamma0_x Z

    Index rank() const { return Z.cols(); }
    Matrix<Scalar> projector() const { return A * Z.transpose(); }
};

template <typename Scalar>
struct SmoothFactorBasis {
    Matrix<Scalar> Z_phi;
    Vector<Scalar> M_star;
    Matrix<Scalar> A_phi;
    int r_phi = 0;

    Matrix<Scalar> Z_chi;
    Vector<Scalar> M_star_chi;
    Matrix<Scalar> A_chi;

    Matrix<Scalar> P_phi;
    Matrix<Scalar> P_chi;

    Matrix<Scalar> pca;       // leading r eigenvectors of gamma0_x
};

template <typename Scalar>
struct FactorSeries {
    Matrix<Scalar> f_phi;  // r_phi x T
    Matrix<Scalar> f_chi;  // r x T
    Matrix<Scalar> f_pca;  // r x T
};

namespace detail {

template <typename Scalar>
Scalar riemann_weight(int m)
{
    return Scalar(2) * Scalar(kPi) / Scalar(2 * m + 1);
}

template <typename Scalar>
Matrix<Scalar> real_symmetric_part(const ComplexMatrix<Scalar>& acc, const char* what)
{
    const Scalar scale = std::max(Scalar(1), acc.cwiseAbs().maxCoeff());
    const Scalar imag = acc.imag().cwiseAbs().maxCoeff();
    if (imag > Scalar(1e-8) * scale)
        throw NumericalError("factor_space", std::string(what) + " has imaginary residue " +
                                                 std::to_string(double(imag)));
    Matrix<Scalar> re = acc.real();
    return (re + re.transpose()) / Scalar(2);
}

template <typename Scalar>
ComplexMatrix<Scalar> leading_part(const FrequencyEigenSystem<Scalar>& eig, Index h, int q)
{
    const auto& p = eig.eigenvectors[static_cast<std::size_t>(h)];
    const auto& l = eig.eigenvalues[static_cast<std::size_t>(h)];
    const auto pq = p.leftCols(q);
    return pq * l.head(q).template cast<std::complex<Scalar>>().asDiagonal() * pq.adjoint();
}

// Flip each column so that its largest-magnitude entry in `reference` is positive.
template <typename Scalar>
void fix_signs(Matrix<Scalar>& columns, const Matrix<Scalar>& reference)
{
    for (Index j = 0; j < columns.cols(); ++j) {
        Index imax = 0;
        reference.col(j).cwiseAbs().maxCoeff(&imax);
        if (reference(imax, j) < Scalar(0)) columns.col(j) *= Scalar(-1);
    }
}

}  // namespace detail

template <typename Scalar>
Matrix<Scalar> common_covariance(const FrequencyEigenSystem<Scalar>& eig, int q)
{
    if (q < 1 || q > eig.n())
        throw ConfigError("factor_space", "dynamic rank q=" + std::to_string(q) + " outside [1, n]");
    const Index n = eig.n();
    ComplexMatrix<Scalar> acc = ComplexMatrix<Scalar>::Zero(n, n);
    for (Index h = 0; h < eig.size(); ++h) acc += detail::leading_part(eig, h, q);
    acc *= detail::riemann_weight<Scalar>(eig.m);
    return detail::real_symmetric_part(acc, "common covariance");
}

// Number of non-negative grid points with theta_h <= theta_c.
template <typename Scalar>
int band_halfwidth(int m, Scalar theta_c)
{
    const Scalar step = Scalar(2) * Scalar(kPi) / Scalar(2 * m + 1);
    return std::min(m, static_cast<int>(std::floor(theta_c / step + Scalar(1e-10))));
}

template <typename Scalar>
std::pair<Matrix<Scalar>, int> lowpass_covariance(const FrequencyEigenSystem<Scalar>& eig, int q, Scalar theta_c)
{
    if (q < 1 || q > eig.n())
        throw ConfigError("factor_space", "dynamic rank q=" + std::to_string(q) + " outside [1, n]");
    if (!(theta_c > Scalar(0)) || theta_c > Scalar(kPi))
        throw ConfigError("factor_space", "cutoff theta_c must lie in (0, pi]");
    const int m = eig.m;
    const int m_c = band_halfwidth(m, theta_c);
    const Index n = eig.n();
    ComplexMatrix<Scalar> acc = ComplexMatrix<Scalar>::Zero(n, n);
    for (int h = -m_c; h <= m_c; ++h) acc += detail::leading_part(eig, h + m, q);
    acc *= detail::riemann_weight<Scalar>(m);
    return {detail::real_symmetric_part(acc, "low-pass covariance"), m_c};
}

template <typename Scalar>
ComponentCovariances<Scalar> component_covariances(const CrossCovarianceSet<Scalar>& covs,
                                                   const FrequencyEigenSystem<Scalar>& eig, int q, Scalar theta_c)
{
    ComponentCovariances<Scalar> out;
    out.gamma0_x = covs.gammas.at(0);
    out.gamma0_chi = common_covariance(eig, q);
    std::tie(out.gamma0_phi, out.m_c) = lowpass_covariance(eig, q, theta_c);
    out.q = q;
    out.theta_c = theta_c;
    return out;
}

// Leading generalized eigenpairs of (target, gamma0_x) through the whitened matrix
// Q = M^{-1/2} S' target S M^{-1/2}, with gamma0_x = S M S'.
template <typename Scalar>
GeneralizedEigs<Scalar> generalized_eigs(const Matrix<Scalar>& target, const Matrix<Scalar>& gamma0_x, Index rank)
{
    const Index n = gamma0_x.rows();
    if (gamma0_x.cols() != n || target.rows() != n || target.cols() != n)
        throw ConfigError("factor_space", "covariance dimensions disagree");
    if (rank < 0 || rank > n) throw ConfigError("factor_space", "rank " + std::to_string(rank) + " outside [0, n]");

    Matrix<Scalar> gx = (gamma0_x + gamma0_x.transpose()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> ex(gx);
    if (ex.info() != Eigen::Success) throw NumericalError("factor_space", "eigensolver failed on gamma0_x");
    if (ex.eigenvalues().minCoeff() < Scalar(1e-10)) {
        gx.diagonal().array() += Scalar(1e-8) * gx.trace() / Scalar(n);
        ex.compute(gx);
        if (ex.info() != Eigen::Success || ex.eigenvalues().minCoeff() <= Scalar(0))
            throw NumericalError("factor_space", "gamma0_x is singular beyond ridge repair");
    }
    const Matrix<Scalar>& S = ex.eigenvectors();
    const Vector<Scalar> inv_sqrt = ex.eigenvalues().array().rsqrt().matrix();
    const Matrix<Scalar> W = S * inv_sqrt.asDiagonal();  // S M^{-1/2}

    Matrix<Scalar> Q = W.transpose() * target * W;
    Q = ((Q + Q.transpose()) / Scalar(2)).eval();
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eq(Q);
    if (eq.info() != Eigen::Success) throw NumericalError("factor_space", "eigensolver failed on whitened target");

    GeneralizedEigs<Scalar> out;
    out.M_star = eq.eigenvalues().reverse().head(rank);
    out.Z = W * eq.eigenvectors().rowwise().reverse().leftCols(rank);
    out.A = gx * out.Z;
    detail::fix_signs(out.Z, out.A);
    detail::fix_signs(out.A, out.A);
    return out;
}

template <typename Scalar>
Matrix<Scalar> principal_directions(const Matrix<Scalar>& gamma0_x, Index rank)
{
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(gamma0_x);
    if (es.info() != Eigen::Success) throw NumericalError("factor_space", "eigensolver failed on gamma0_x");
    Matrix<Scalar> dirs = es.eigenvectors().rowwise().reverse().leftCols(rank);
    detail::fix_signs(dirs, Matrix<Scalar>(dirs));
    return dirs;
}

template <typename Scalar>
SmoothFactorBasis<Scalar> build_basis(const ComponentCovariances<Scalar>& cov, int r, int r_phi)
{
    const Index n = cov.gamma0_x.rows();
    if (r < 1 || r > n) throw ConfigError("factor_space", "static rank r=" + std::to_string(r) + " outside [1, n]");
    if (r_phi < 1 || r_phi > r)
        throw ConfigError("factor_space", "smooth rank r_phi=" + std::to_string(r_phi) + " outside [1, r]");

    auto phi = generalized_eigs(cov.gamma0_phi, cov.gamma0_x, r_phi);
    auto chi = generalized_eigs(cov.gamma0_chi, cov.gamma0_x, r);
    SmoothFactorBasis<Scalar> b;
    b.r_phi = r_phi;
    b.P_phi = phi.projector();
    b.P_chi = chi.projector();
    b.Z_phi = std::move(phi.Z);
    b.M_star = std::move(phi.M_star);
    b.A_phi = std::move(phi.A);
    b.Z_chi = std::move(chi.Z);
    b.M_star_chi = std::move(chi.M_star);
    b.A_chi = std::move(chi.A);
    b.pca = principal_directions(cov.gamma0_x, r);
    return b;
}

template <typename Derived>
FactorSeries<typename Derived::Scalar> smooth_factors(const Eigen::MatrixBase<Derived>& x,
                                                      const SmoothFactorBasis<typename Derived::Scalar>& basis)
{
    if (x.rows() != basis.Z_phi.rows()) throw ConfigError("factor_space", "panel and basis dimensions disagree");
    FactorSeries<typename Derived::Scalar> out;
    out.f_phi = basis.Z_phi.transpose() * x;
    out.f_chi = basis.Z_chi.transpose() * x;
    out.f_pca = basis.pca.transpose() * x;
    return out;
}

// ---- rank selection ----

struct RankConfig {
    std::optional<int> q;      // fixed values bypass the criteria
    std::optional<int> r;
    std::optional<int> r_phi;
    int k_max = 8;             // Bai-Ng search range 0..k_max
    int q_max = 6;             // Hallin-Liska search range 0..q_max
    double theta_c = kPi / 6;
    int subsets = 8;           // nested cross-section sizes scanned by Hallin-Liska
    double c_min = 0.01;
    double c_max = 3.0;
    double c_step = 0.01;
    double c_default = 1.0;    // used when no stable interval beyond the first exists
};

struct RankSelection {
    int q = 0;
    int r = 0;
    int r_phi = 0;
};

// ICp2 over descending eigenvalues of a covariance matrix of an n x T panel.
template <typename Scalar>
int bai_ng_icp2(const Vector<Scalar>& eigenvalues_desc, Index n, Index T, int k_max)
{
    if (k_max < 0 || k_max >= std::min(n, T))
        throw ConfigError("factor_space", "k_max=" + std::to_string(k_max) + " must be below min(n, T)");
    const Scalar nn = Scalar(n), tt = Scalar(T);
    const Scalar penalty = (nn + tt) / (nn * tt) * std::log(std::min(nn, tt));
    Scalar total = eigenvalues_desc.sum() / nn;
    const Scalar floor = std::max(total, Scalar(1e-300)) * Scalar(1e-12);
    int best = 0;
    Scalar best_ic = std::numeric_limits<Scalar>::infinity();
    Scalar v = total;
    for (int k = 0; k <= k_max; ++k) {
        if (k > 0) v -= eigenvalues_desc(k - 1) / nn;
        const Scalar ic = std::log(std::max(v, floor)) + Scalar(k) * penalty;
        if (ic < best_ic - Scalar(1e-12)) {
            best_ic = ic;
            best = k;
        }
    }
    return best;
}

// Hallin-Liska penalty p(n, T) with lag window M.
inline double hallin_liska_penalty(double n, double T, double M)
{
    return (1.0 / (M * M) + std::sqrt(M / T) + 1.0 / n) * std::log(std::min({n, M * M, std::sqrt(T / M)}));
}

namespace detail {

// Average over the grid of the dynamic eigenvalues of the leading n_j x n_j block.
template <typename Scalar>
Vector<Scalar> averaged_dynamic_eigenvalues(const SpectrumEstimate<Scalar>& spectrum, Index n_j)
{
    const int m = spectrum.m;
    Vector<Scalar> avg = Vector<Scalar>::Zero(n_j);
    for (int h = 0; h <= m; ++h) {
        const Vector<Scalar> l =
            hermitian_eigenvalues<Scalar>(spectrum.at(h).topLeftCorner(n_j, n_j).eval());
        avg += (h == 0 ? Scalar(1) : Scalar(2)) * l;
    }
    return avg / Scalar(2 * m + 1);
}

inline int hl_minimizer(const Vector<double>& avg, double n_j, double penalty, double c, int q_max)
{
    const int kmax = std::min<int>(q_max, static_cast<int>(avg.size()) - 1);
    double tail = avg.sum();
    int best = 0;
    double best_ic = std::numeric_limits<double>::infinity();
    const double floor = std::max(tail, 1e-300) * 1e-12;
    for (int k = 0; k <= kmax; ++k) {
        if (k > 0) tail -= avg(k - 1);
        const double ic = std::log(std::max(tail / n_j, floor / n_j)) + c * k * penalty;
        if (ic < best_ic - 1e-12) {
            best_ic = ic;
            best = k;
        }
    }
    return best;
}

}  // namespace detail

// Simplified Hallin-Liska: for each penalty constant c the criterion is minimized on nested
// cross sections; the chosen q is the full-sample minimizer in the second interval of c
// over which the subset minimizers agree.
template <typename Scalar>
int hallin_liska_q(const SpectrumEstimate<Scalar>& spectrum, const RankConfig& cfg)
{
    const Index n = spectrum.n();
    const double T = static_cast<double>(spectrum.T);
    const double M = static_cast<double>(std::max(1, spectrum.M_T));
    const int J = std::max(1, cfg.subsets);
    const Index smallest = std::max<Index>(std::min<Index>(n, cfg.q_max + 1), n / 2);

    std::vector<Index> sizes;
    for (int j = 0; j < J; ++j) {
        const Index nj = J == 1 ? n : smallest + (n - smallest) * j / (J - 1);
        if (sizes.empty() || sizes.back() != nj) sizes.push_back(nj);
    }
    std::vector<Vector<double>> avgs;
    std::vector<double> penalties;
    for (Index nj : sizes) {
        avgs.push_back(detail::averaged_dynamic_eigenvalues(spectrum, nj).template cast<double>());
        penalties.push_back(hallin_liska_penalty(double(nj), T, M));
    }

    struct Scan {
        double c;
        int q_full;
        bool stable;
    };
    std::vector<Scan> scan;
    for (double c = cfg.c_min; c <= cfg.c_max + 1e-12; c += cfg.c_step) {
        std::vector<int> qs;
        for (std::size_t j = 0; j < sizes.size(); ++j)
            qs.push_back(detail::hl_minimizer(avgs[j], double(sizes[j]), penalties[j], c, cfg.q_max));
        double mean = 0;
        for (int v : qs) mean += v;
        mean /= double(qs.size());
        double var = 0;
        for (int v : qs) var += (v - mean) * (v - mean);
        scan.push_back({c, qs.back(), var < 1e-12});
    }

    // Stable intervals: maximal runs of stable c with a constant full-sample minimizer.
    int interval = 0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        if (!scan[i].stable) continue;
        const bool starts = i == 0 || !scan[i - 1].stable || scan[i - 1].q_full != scan[i].q_full;
        if (starts && ++interval == 2) return scan[i].q_full;
    }
    return detail::hl_minimizer(avgs.back(), double(n), penalties.back(), cfg.c_default, cfg.q_max);
}

template <typename Derived>
RankSelection select_ranks(const Eigen::MatrixBase<Derived>& x,
                           const SpectrumEstimate<typename Derived::Scalar>& spectrum, const RankConfig& cfg)
{
    using Scalar = typename Derived::Scalar;
    const Index n = x.rows(), T = x.cols();
    RankSelection out;

    if (cfg.r) {
        out.r = *cfg.r;
    } else {
        const Matrix<Scalar> g0 = x * x.transpose() / Scalar(T);
        Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(g0, Eigen::EigenvaluesOnly);
        out.r = bai_ng_icp2<Scalar>(es.eigenvalues().reverse(), n, T, cfg.k_max);
    }

    if (cfg.q) out.q = *cfg.q;
    else out.q = hallin_liska_q(spectrum, cfg);

    if (cfg.r_phi) {
        out.r_phi = *cfg.r_phi;
    } else {
        const Matrix<Scalar> band = integrate_spectrum(spectrum, Scalar(cfg.theta_c));
        Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(band, Eigen::EigenvaluesOnly);
        out.r_phi = std::min(out.r, bai_ng_icp2<Scalar>(es.eigenvalues().reverse(), n, T, cfg.k_max));
    }
    return out;
}

}  // namespace coin
