#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ccopt/errors.hpp"
#include "ccopt/expint.hpp"
#include "ccopt/rng.hpp"

namespace ccopt {

// Stream tags keep derived RNG streams for different purposes disjoint.
namespace streams {
constexpr std::uint64_t fading = 0x66616465ULL;
constexpr std::uint64_t positions = 0x706f7321ULL;
constexpr std::uint64_t realization = 0x7265616cULL;
} // namespace streams

struct NetworkScenario {
    int users = 0;
    int bs_antennas = 0;       // transmit array size
    int user_antennas = 1;     // receive antennas per user
    int bins = 1;              // wideband frequency bins
    double symbol_rate = 1.0;  // symbols/second per bin
    double noise_power = 1.0;
    double total_power = 1.0;
    double pathloss_exp = 3.0;
    std::vector<double> distances; // per user; empty means "draw from cell_radius"
    double cell_radius = 0.0;
    std::uint64_t seed = 0;

    // spatial multiplexing dimension: how many users zero-forcing can
    // separate; the array must factor as mux_dim * user_antennas
    int mux_dim() const { return bs_antennas / user_antennas; }

    void validate() const {
        if (users < 1) throw ConfigError("scenario: users must be >= 1");
        if (bs_antennas < 1 || user_antennas < 1)
            throw ConfigError("scenario: antenna counts must be >= 1");
        if (bs_antennas % user_antennas != 0)
            throw ConfigError("scenario: bs_antennas must be a multiple of user_antennas");
        if (bins < 1) throw ConfigError("scenario: bins must be >= 1");
        if (!(symbol_rate > 0)) throw ConfigError("scenario: symbol_rate must be > 0");
        if (!(noise_power > 0)) throw ConfigError("scenario: noise_power must be > 0");
        if (!(total_power > 0)) throw ConfigError("scenario: total_power must be > 0");
        if (!(pathloss_exp > 0)) throw ConfigError("scenario: pathloss_exp must be > 0");
        if (distances.empty()) {
            if (!(cell_radius > 0))
                throw ConfigError("scenario: provide distances or a positive cell_radius");
        } else {
            if (static_cast<int>(distances.size()) != users)
                throw ConfigError("scenario: distances must list one entry per user");
            for (double r : distances)
                if (!(r > 0)) throw ConfigError("scenario: distances must be strictly positive");
        }
    }
};

struct FadingRealization {
    int users = 0;
    int bins = 0;
    int rx = 0;
    int tx = 0;
    std::uint64_t seed = 0;
    std::vector<Eigen::MatrixXcd> mats; // users*bins matrices, bin-major per user

    const Eigen::MatrixXcd& at(int user, int bin) const {
        return mats[static_cast<std::size_t>(user) * bins + bin];
    }
};

// Unit-variance Rayleigh draws, one rx-by-tx matrix per (user, bin). Each
// pair has its own derived stream, so draws are reproducible and independent
// of evaluation order.
inline FadingRealization sample_fading(const NetworkScenario& sc) {
    sc.validate();
    FadingRealization f;
    f.users = sc.users;
    f.bins = sc.bins;
    f.rx = sc.user_antennas;
    f.tx = sc.bs_antennas;
    f.seed = sc.seed;
    f.mats.resize(static_cast<std::size_t>(sc.users) * sc.bins);
    for (int u = 0; u < sc.users; ++u) {
        for (int m = 0; m < sc.bins; ++m) {
            Rng rng(sc.seed, {streams::fading, static_cast<std::uint64_t>(u),
                              static_cast<std::uint64_t>(m)});
            Eigen::MatrixXcd g(f.rx, f.tx);
            for (int r = 0; r < f.rx; ++r)
                for (int c = 0; c < f.tx; ++c) g(r, c) = rng.next_cnormal();
            f.mats[static_cast<std::size_t>(u) * sc.bins + m] = std::move(g);
        }
    }
    return f;
}

struct ZfProjector {
    Eigen::MatrixXcd p; // tx-by-tx orthogonal projector
    int rank = 0;       // dimension of the preserved subspace
};

// Projector onto the orthogonal complement of the stacked rows of
// channels_to_null. Built from an SVD so near-dependent rows are detected
// instead of amplified; singular values below 1e-10 of the largest count as
// zero and any such collapse is reported for the caller to resample.
inline ZfProjector zf_projector(const std::vector<Eigen::MatrixXcd>& channels_to_null, int tx) {
    int rows = 0;
    for (const auto& h : channels_to_null) {
        if (h.cols() != tx) throw ConfigError("zf_projector: channel column count != tx");
        rows += static_cast<int>(h.rows());
    }
    ZfProjector out;
    if (rows == 0) {
        out.p = Eigen::MatrixXcd::Identity(tx, tx);
        out.rank = tx;
        return out;
    }
    if (rows >= tx)
        throw ConfigError("zf_projector: cannot null " + std::to_string(rows) +
                          " dimensions with " + std::to_string(tx) + " antennas");
    Eigen::MatrixXcd stacked(rows, tx);
    int at = 0;
    for (const auto& h : channels_to_null) {
        stacked.middleRows(at, h.rows()) = h;
        at += static_cast<int>(h.rows());
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-10 * sv(0);
    int effective = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++effective;
    if (effective < rows)
        throw NumericalError("zf_projector: nulled channels are rank deficient "
                             "(degenerate fading draw, resample)");
    const Eigen::MatrixXcd v = svd.matrixV().leftCols(effective);
    out.p = Eigen::MatrixXcd::Identity(tx, tx) - v * v.adjoint();
    out.p = 0.5 * (out.p + out.p.adjoint().eval()); // symmetrize roundoff
    out.rank = tx - effective;
    return out;
}

// Gram matrix G P G^H of the projected channel; order rx-by-rx.
inline Eigen::MatrixXcd effective_gain(const Eigen::MatrixXcd& g, const ZfProjector& proj) {
    if (g.cols() != proj.p.rows())
        throw ConfigError("effective_gain: dimension mismatch");
    return g * proj.p * g.adjoint();
}

// Scalar gain for single-antenna receivers.
inline double effective_gain_scalar(const Eigen::MatrixXcd& g, const ZfProjector& proj) {
    const std::complex<double> v = effective_gain(g, proj)(0, 0);
    return std::max(0.0, v.real());
}

// Finite-bandwidth rate of one user: symbol_rate * sum over bins of
// log2 det(I + (power * r^-alpha / sigma^2) * p_m * G P G^H), with the
// projector rebuilt per bin from that bin's nulled channels. intra_power
// must average to one across bins; per-bin power is power * intra_power[m].
inline double user_rate_mc(const NetworkScenario& sc, const FadingRealization& fading,
                           int user, double power, const std::vector<double>& intra_power,
                           const std::vector<int>& nulled_users) {
    sc.validate();
    if (user < 0 || user >= sc.users) throw ConfigError("user_rate_mc: user out of range");
    if (!(power >= 0)) throw ConfigError("user_rate_mc: power must be >= 0");
    if (static_cast<int>(intra_power.size()) != sc.bins)
        throw ConfigError("user_rate_mc: intra_power needs one entry per bin");
    double mean = 0;
    for (double p : intra_power) {
        if (!(p >= 0)) throw ConfigError("user_rate_mc: intra_power must be >= 0");
        mean += p;
    }
    mean /= sc.bins;
    if (std::abs(mean - 1.0) > 1e-9)
        throw ConfigError("user_rate_mc: intra_power must average to 1 across bins");
    for (int z : nulled_users)
        if (z < 0 || z >= sc.users || z == user)
            throw ConfigError("user_rate_mc: invalid nulled user index");
    if (static_cast<int>(sc.distances.size()) != sc.users)
        throw ConfigError("user_rate_mc: scenario needs explicit distances");

    const double r = sc.distances[static_cast<std::size_t>(user)];
    const double eta_scale = power * std::pow(r, -sc.pathloss_exp) / sc.noise_power;
    const int nr = sc.user_antennas;
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(nr, nr);
    double sum_log2 = 0;
    std::vector<Eigen::MatrixXcd> to_null(nulled_users.size());
    for (int m = 0; m < sc.bins; ++m) {
        for (std::size_t k = 0; k < nulled_users.size(); ++k)
            to_null[k] = fading.at(nulled_users[k], m);
        const ZfProjector proj = zf_projector(to_null, sc.bs_antennas);
        const Eigen::MatrixXcd gram = effective_gain(fading.at(user, m), proj);
        const double det = (eye + (eta_scale * intra_power[m]) * gram).determinant().real();
        sum_log2 += std::log2(std::max(det, 1.0));
    }
    return sc.symbol_rate * sum_log2;
}

// Fading-averaged rate for a single-antenna user with flat intra-user power:
// -B * R_S * log2(e) * e^(1/eta) * Ei(-1/eta), evaluated in scaled form so
// small eta cannot overflow.
inline double user_rate_closed_form(double eta, int bins, double symbol_rate) {
    if (!(eta > 0)) throw ConfigError("user_rate_closed_form: eta must be > 0");
    constexpr double log2e = 1.4426950408889634073599246810019;
    return -static_cast<double>(bins) * symbol_rate * log2e * exp_int_ei_scaled(1.0 / eta);
}

} // namespace ccopt
