#ifndef ACCRETA_REPORT_HPP
#define ACCRETA_REPORT_HPP

#include "accreta/config.hpp"

namespace accreta {

json to_json(const Check& c);
json to_json(const RegularityReport& r);
json to_json(const SliceReport& r);
json to_json(const std::vector<SliceReport>& r);
/// Iteration records without wall-clock timings, so reruns reproduce it exactly.
json history_json(const std::vector<IterationRecord>& history, Verdict verdict, double representation_residual,
                  const CouplingConfig& config);

/// Checks on a solved growth: energy identity per slice and the Ku time-Lipschitz and uniform bounds.
json elliptic_summary(const TimeField& u, double cg_tol);
json convolution_summary(const TimeField& u, const ActivationTrace& ku, const KernelPair& kp);

}  // namespace accreta

#endif  // ACCRETA_REPORT_HPP
