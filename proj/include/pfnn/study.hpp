#ifndef PFNN_STUDY_HPP
#define PFNN_STUDY_HPP

#include <vector>

#include "pfnn/config.hpp"
#include "pfnn/error_analysis.hpp"

// Convergence study over the layer counts of a run configuration.  The
// volume integrals do not depend on the depth, so they are computed once
// and shared across the study rows.

namespace pfnn {

struct StudyRow {
    std::size_t n_layers = 0;
    ErrorReport report;        // measured metrics and assembled bounds
    double beta_norm_inf = 0.0;
    double beta_norm_rms = 0.0;
};

// Forward problems sweep the depth of a single solve; the semi-linear
// problem reports its first outer iteration per depth (plus a two-step
// contraction estimate for the bound).
std::vector<StudyRow> run_convergence_study(const RunConfig& config, const ProblemSetup& setup,
                                            int threads);

std::string study_csv(const std::vector<StudyRow>& rows);

}  // namespace pfnn

#endif
