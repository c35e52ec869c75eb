#pragma once

// Lag-window spectral estimation of a multivariate panel on the symmetric grid
// theta_h = 2 pi h / (2m + 1), h = -m..m, with Hermitian eigendecompositions per frequency.

#include "coin/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <vector>

namespace coin {

template <typename Scalar>
struct CrossCovarianceSet {
    std::vector<Matrix<Scalar>> gammas;  // gammas[k] = (1/T) sum_t x_t x_{t-k}', k = 0..M_T
    Index T = 0;
    int M_T = 0;

    Index n() const { return gammas.empty() ? 0 : gammas.front().rows(); }
};

template <typename Scalar>
struct SpectrumEstimate {
    Vector<Scalar> freqs;                           // 2m+1 ascending, freqs(m) == 0
    std::vector<ComplexMatrix<Scalar>> matrices;    // matrices[h + m] at theta_h
    int M_T = 0;
    int m = 0;
    Index T = 0;

    Index size() const { return static_cast<Index>(matrices.size()); }
    Index n() const { return matrices.empty() ? 0 : matrices.front().rows(); }
    const ComplexMatrix<Scalar>& at(int h) const { return matrices[static_cast<std::size_t>(h + m)]; }
};

template <typename Scalar>
struct FrequencyEigenSystem {
    Vector<Scalar> freqs;
    std::vector<Vector<Scalar>> eigenvalues;          // descending
    std::vector<ComplexMatrix<Scalar>> eigenvectors;  // columns orthonormal
    int m = 0;

    Index size() const { return static_cast<Index>(eigenvalues.size()); }
    Index n() const { return eigenvalues.empty() ? 0 : eigenvalues.front().size(); }
};

template <typename Scalar>
Vector<Scalar> frequency_grid(int m)
{
    Vector<Scalar> f(2 * m + 1);
    for (int h = -m; h <= m; ++h)
        f(h + m) = Scalar(2) * Scalar(kPi) * Scalar(h) / Scalar(2 * m + 1);
    return f;
}

template <typename Derived>
CrossCovarianceSet<typename Derived::Scalar> cross_covariances(const Eigen::MatrixBase<Derived>& x, int M_T)
{
    using Scalar = typename Derived::Scalar;
    const Index T = x.cols();
    if (M_T < 0 || M_T >= T)
        throw ConfigError("spectral", "window size M_T=" + std::to_string(M_T) + " must satisfy 0 <= M_T < T=" +
                                          std::to_string(T));
    CrossCovarianceSet<Scalar> out;
    out.T = T;
    out.M_T = M_T;
    out.gammas.reserve(static_cast<std::size_t>(M_T) + 1);
    const Matrix<Scalar> xe = x;
    for (int k = 0; k <= M_T; ++k) {
        Matrix<Scalar> g = xe.rightCols(T - k) * xe.leftCols(T - k).transpose();
        g /= Scalar(T);
        out.gammas.push_back(std::move(g));
    }
    out.gammas[0] = (out.gammas[0] + out.gammas[0].transpose()).eval() / Scalar(2);
    return out;
}

template <typename Scalar>
Scalar bartlett_weight(int k, int M_T)
{
    return Scalar(1) - Scalar(std::abs(k)) / Scalar(M_T + 1);
}

// Sigma(theta) = (1/2pi) sum_{|k|<=M_T} (1 - |k|/(M_T+1)) Gamma_k e^{-i theta k}
template <typename Scalar>
SpectrumEstimate<Scalar> bartlett_spectrum(const CrossCovarianceSet<Scalar>& covs, int m)
{
    if (m < 1) throw ConfigError("spectral", "grid half-width m must be >= 1");
    using Complex = std::complex<Scalar>;
    SpectrumEstimate<Scalar> out;
    out.m = m;
    out.M_T = covs.M_T;
    out.T = covs.T;
    out.freqs = frequency_grid<Scalar>(m);
    out.matrices.resize(static_cast<std::size_t>(2 * m + 1));

    const Scalar inv2pi = Scalar(1) / (Scalar(2) * Scalar(kPi));
    for (int h = 0; h <= m; ++h) {
        const Scalar theta = out.freqs(h + m);
        ComplexMatrix<Scalar> s = covs.gammas[0].template cast<Complex>();
        for (int k = 1; k <= covs.M_T; ++k) {
            const Scalar w = bartlett_weight<Scalar>(k, covs.M_T);
            const Complex e = std::polar(w, -theta * Scalar(k));
            // Gamma_{-k} = Gamma_k'
            s += e * covs.gammas[k].template cast<Complex>() +
                 std::conj(e) * covs.gammas[k].transpose().template cast<Complex>();
        }
        s *= inv2pi;
        s = ((s + s.adjoint()) / Scalar(2)).eval();
        out.matrices[static_cast<std::size_t>(h + m)] = s;
        out.matrices[static_cast<std::size_t>(m - h)] = s.conjugate();
    }
    return out;
}

// Descending eigenvalues; each eigenvector is rotated so that its largest-magnitude entry
// is real and positive.
template <typename Scalar>
std::pair<Vector<Scalar>, ComplexMatrix<Scalar>> hermitian_eig(const ComplexMatrix<Scalar>& a)
{
    const Scalar scale = std::max(Scalar(1), a.cwiseAbs().maxCoeff());
    const Scalar residual = (a - a.adjoint()).cwiseAbs().maxCoeff();
    if (residual > Scalar(1e-10) * scale)
        throw NumericalError("spectral", "matrix is not Hermitian (residual " + std::to_string(double(residual)) + ")");

    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(a);
    if (es.info() != Eigen::Success) throw NumericalError("spectral", "Hermitian eigensolver failed");
    const Index n = a.rows();
    Vector<Scalar> values = es.eigenvalues().reverse();
    ComplexMatrix<Scalar> vectors = es.eigenvectors().rowwise().reverse();
    for (Index j = 0; j < n; ++j) {
        Index imax = 0;
        vectors.col(j).cwiseAbs().maxCoeff(&imax);
        const std::complex<Scalar> v = vectors(imax, j);
        if (std::abs(v) > Scalar(0)) vectors.col(j) *= std::conj(v) / std::abs(v);
    }
    return {std::move(values), std::move(vectors)};
}

template <typename Scalar>
FrequencyEigenSystem<Scalar> hermitian_eig(const SpectrumEstimate<Scalar>& spectrum)
{
    FrequencyEigenSystem<Scalar> out;
    out.freqs = spectrum.freqs;
    out.m = spectrum.m;
    const auto count = static_cast<std::size_t>(spectrum.size());
    out.eigenvalues.resize(count);
    out.eigenvectors.resize(count);
    const int m = spectrum.m;
    // Sigma(-theta) = conj(Sigma(theta)): same eigenvalues, conjugate eigenvectors.
    for (int h = 0; h <= m; ++h) {
        auto [values, vectors] = hermitian_eig<Scalar>(spectrum.at(h));
        out.eigenvalues[static_cast<std::size_t>(m - h)] = values;
        out.eigenvectors[static_cast<std::size_t>(m - h)] = vectors.conjugate();
        out.eigenvalues[static_cast<std::size_t>(m + h)] = std::move(values);
        out.eigenvectors[static_cast<std::size_t>(m + h)] = std::move(vectors);
    }
    return out;
}

// Eigenvalues only, for rank criteria on cross-sectional subsets.
template <typename Scalar>
Vector<Scalar> hermitian_eigenvalues(const ComplexMatrix<Scalar>& a)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("spectral", "Hermitian eigensolver failed");
    return es.eigenvalues().reverse();
}

// Riemann sum (2pi/(2m+1)) sum_h Sigma(theta_h) over |theta_h| <= cutoff.
template <typename Scalar>
Matrix<Scalar> integrate_spectrum(const SpectrumEstimate<Scalar>& spectrum, Scalar cutoff = Scalar(kPi))
{
    const Index n = spectrum.n();
    ComplexMatrix<Scalar> acc = ComplexMatrix<Scalar>::Zero(n, n);
    for (Index h = 0; h < spectrum.size(); ++h)
        if (std::abs(spectrum.freqs(h)) <= cutoff + Scalar(1e-12)) acc += spectrum.matrices[h];
    acc *= Scalar(2) * Scalar(kPi) / Scalar(2 * spectrum.m + 1);
    Matrix<Scalar> re = acc.real();
    return (re + re.transpose()) / Scalar(2);
}

}  // namespace coin
