#pragma once

#include "osl/vmd.hpp"

namespace osl {

struct EMDParams {
    int max_imfs = 3;
    double sift_sd_threshold = 0.2;  // Huang's classic stopping value
    int max_sifts_per_imf = 100;

    void validate() const;
};

/// Sifting decomposition. Modes come out highest-frequency first and are
/// reversed before returning so index 0 is the lowest-frequency mode, the
/// same layout vmd_decompose uses. The unsifted remainder is the residual,
/// so modes + residual reproduce the input exactly.
IMFSet emd_decompose(const Signal& signal, const EMDParams& params);

}  // namespace osl
