#pragma once

#include "twistgap/numeric.hpp"

#include <string>

namespace twistgap {

enum class PairMethod { enumeration, transfer_matrix, closed_form, monte_carlo };

inline std::string to_string(PairMethod m) {
    switch (m) {
        case PairMethod::enumeration: return "enumeration";
        case PairMethod::transfer_matrix: return "transfer-matrix";
        case PairMethod::closed_form: return "closed-form";
        case PairMethod::monte_carlo: return "monte-carlo";
    }
    return "?";
}

/// Untwisted and twisted partition functions in log domain.
/// one_minus_ratio = 1 - Z_tw / Z is kept separately because it is usually far
/// below the rounding error of either logarithm.
struct PartitionPair {
    double log_Z = 0.0;
    double log_Z_twisted = 0.0;
    SignedLog one_minus_ratio;
    PairMethod method = PairMethod::closed_form;

    double ratio() const { return 1.0 - one_minus_ratio.value(); }
    /// Values outside [0, 1] are legal but unusual; callers flag them.
    bool ratio_in_unit_interval() const {
        const double v = one_minus_ratio.value();
        return v >= 0.0 && v <= 1.0;
    }
};

/// Builds the pair from the two logs when no better route to the difference exists.
inline PartitionPair pair_from_logs(double log_z, double log_zt, PairMethod m) {
    PartitionPair p{log_z, log_zt, {}, m};
    const double d = log_zt - log_z;
    if (d < 0) p.one_minus_ratio = SignedLog::from_log(log1mexp(d));
    else if (d > 0) p.one_minus_ratio = SignedLog::from_log(std::log(std::expm1(d)), -1);
    return p;
}

}  // namespace twistgap
