#pragma once

#include "octoval/valuation.hpp"

#include <string>
#include <vector>

namespace octoval::checks {

/// One verified statement: measured value against its threshold.
struct Row {
    std::string name;
    double value = 0.0;      // measured residual / statistic
    double threshold = 0.0;  // documented tolerance it must meet
    bool pass = false;
    std::string detail;      // optional context (counts, witnesses)
};

struct Suite {
    std::string name;
    std::vector<Row> rows;

    bool pass() const {
        for (const Row& r : rows)
            if (!r.pass) return false;
        return true;
    }
    Row& add(const std::string& name, double value, double threshold, bool ok,
             const std::string& detail = "") {
        rows.push_back(Row{name, value, threshold, ok, detail});
        return rows.back();
    }
    /// value must be <= threshold.
    Row& bound(const std::string& name, double value, double threshold,
               const std::string& detail = "") {
        return add(name, value, threshold, value <= threshold, detail);
    }
};

/// Basis-table fidelity and the weak associativity identities.
Suite algebra_suite(std::uint64_t seed, std::int64_t samples);

/// theta/j inversion, sphere averages, Sylvester criterion, the mixed
/// determinant inequality and signature, and the entry-norm bound.
Suite hermitian_suite(std::uint64_t seed);

/// Closure dimensions, compactness, det invariance, and the equivariance
/// battery of the group actions.
Suite spin_suite(std::uint64_t seed);

/// Line-Laplacian identity, Hessian of embedded quadratic forms, and the
/// Hessian pullback equivariance.
Suite calculus_suite(std::uint64_t seed);

/// Full symmetry of the trilinear Monge-Ampere form on bump triples.
Suite tau_suite(std::uint64_t seed, std::int64_t n, int triples);

/// Smoothed-max determinant identity: crossing pair plus degenerate cases.
Suite blocki_suite(std::uint64_t seed, std::int64_t n);

/// Valuation law: box additivity ladder plus bitwise translation invariance
/// and 2-homogeneity of the weighted valuation and the pseudo-volume.
Suite valuation_law_suite(std::uint64_t seed, std::int64_t n);

/// Pseudo-volume against the radial oracle; Spin(9) invariance over sampled
/// group elements; the pinned SO(16) non-invariance witness.
/// witness_json: contents of the witness fixture (empty string = search).
Suite pseudo_volume_suite(std::uint64_t seed, std::int64_t n, const std::string& witness_json);

/// T_i / U_j values for balls and the ellipsoid Gram oracle.
Suite classical_valuation_suite(std::uint64_t seed, std::int64_t n);

/// Radon transform values, the two 13440 derivations, inversion constant,
/// pointwise inversion, and Spin(9) equivariance.
Suite radon_suite(std::uint64_t seed, std::int64_t n_lines);

/// Search for an SO(16) rotation and ellipsoid separating the pseudo-volume
/// by more than 5 sigma; returns the witness serialized as JSON.
std::string find_so16_witness(std::uint64_t seed, std::int64_t n);

} // namespace octoval::checks
