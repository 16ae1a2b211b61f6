#ifndef PFNN_REPORTING_HPP
#define PFNN_REPORTING_HPP

#include <string>
#include <vector>

// Assembles run artifacts into one machine-readable reproduction report
// comparing measured metrics against the experiment targets.

namespace pfnn {

struct ReproductionRecord {
    std::string name;
    double target_value = 0.0;
    std::string target_source;
    double measured = 0.0;
    double tolerance = 0.0;
    // upper_bound: measured <= target; relative: |m-t| <= tol |t|;
    // positive: measured > 0; lower_bound: measured >= target
    std::string semantics = "upper_bound";
    bool pass = false;
    bool skipped = false;
};

struct ReproductionReport {
    std::vector<ReproductionRecord> records;
    bool overall_pass = false;
    std::vector<std::string> missing_artifacts;

    std::string to_json() const;
    std::string summary_text() const;
};

// Scans artifact_dir for the preset outputs (poisson-ex1/, helmholtz-ex1/,
// bratu-ex1/, inverse-ex1/) and evaluates one record per criterion.
// Missing artifacts leave their records skipped; the report is emitted
// regardless.
ReproductionReport build_report(const std::string& artifact_dir);

}  // namespace pfnn

#endif
