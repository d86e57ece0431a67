#pragma once

#include <vector>

#include "osl/signal.hpp"

namespace osl {

struct VMDParams {
    int k = 3;                  // number of modes
    double alpha = 2000.0;      // bandwidth penalty
    double tau = 0.0;           // dual-ascent step; 0 = noise-robust
    double tolerance = 1e-7;    // convergence threshold on relative update norm
    int max_iterations = 500;
    bool dc_mode = false;       // pin the first center frequency at 0

    void validate() const;
};

/// Decomposition result shared by VMD and EMD. Modes are ordered
/// lowest-frequency first; center frequencies are in cycles/sample.
/// EMD fills `residual` with the trend remainder; VMD leaves it zero.
struct IMFSet {
    std::vector<Signal> modes;
    std::vector<double> center_frequencies;
    Signal residual;
    int iterations_used = 0;
    double final_update_norm = 0.0;

    bool converged(double tolerance) const {
        return final_update_norm <= tolerance;
    }
};

/// Variational mode decomposition: Fourier-domain alternating updates with
/// dual ascent on the reconstruction constraint. The signal is mirror-extended
/// before the solve and center-cropped after.
IMFSet vmd_decompose(const Signal& signal, const VMDParams& params);

/// Relative L2 norm of (original - sum of modes - residual).
double reconstruction_error(const Signal& original, const IMFSet& imfs);

}  // namespace osl
