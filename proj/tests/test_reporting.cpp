#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pfnn/reporting.hpp"

using namespace pfnn;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    out << text;
}

void write_passing_artifacts(const fs::path& root) {
    write(root / "poisson-ex1" / "report.json",
          R"({"mae_interior":1e-4,"linf_interior":1e-3,"mae_boundary":1e-13,
              "linf_boundary":5e-13,"bound_interior":1e-2,"bound_boundary":1e-10})");
    write(root / "poisson-ex1" / "study.csv",
          "M,mae_int,linf_int,mae_bnd,linf_bnd,bound_int,bound_bnd,beta_norm,beta_rms\n"
          "1,0.1,0.2,1e-3,2e-3,1,1,0.3,0.3\n"
          "10,0.01,0.02,1e-6,2e-6,1,1,0.4,0.4\n"
          "100,0.001,0.002,1e-13,2e-13,1,1,0.5,0.5\n");
    write(root / "helmholtz-ex1" / "report.json",
          R"({"mae_interior":1e-4,"linf_interior":2e-3,"mae_boundary":2e-13,
              "linf_boundary":6e-13,"bound_interior":1e-2,"bound_boundary":1e-10})");
    write(root / "bratu-ex1" / "report.json",
          R"({"mae_interior":1e-3,"linf_interior":4e-3,"mae_boundary":1e-13,
              "linf_boundary":3e-13,"bound_interior":0.1,"bound_boundary":1e-9})");
    write(root / "bratu-ex1" / "metrics.jsonl",
          "{\"n\":1,\"max_update\":0.9,\"mae_interior\":0.4,\"mae_boundary\":1e-13}\n"
          "{\"n\":2,\"max_update\":0.5,\"mae_interior\":0.2,\"mae_boundary\":1e-13}\n"
          "{\"n\":3,\"max_update\":0.2,\"mae_interior\":0.1,\"mae_boundary\":1e-13}\n"
          "{\"n\":4,\"max_update\":0.07,\"mae_interior\":0.05,\"mae_boundary\":1e-13}\n"
          "{\"n\":5,\"max_update\":0.02,\"mae_interior\":0.02,\"mae_boundary\":1e-13}\n");
    write(root / "bratu-ex1" / "study.csv",
          "M,mae_int,linf_int,mae_bnd,linf_bnd,bound_int,bound_bnd,beta_norm,beta_rms\n"
          "20,0.4,0.5,1e-12,2e-12,1,1,1.04435,1.04435\n"
          "30,0.4,0.5,1e-12,2e-12,1,1,1.04436,1.04436\n");
    write(root / "inverse-ex1" / "stats.json",
          R"({"train_mse":{"mean":8e-7,"p10":1e-7,"p90":3e-6},
              "test_linf_interior":{"mean":8e-3,"p10":4e-3,"p90":2e-2},
              "boundary_mae":{"mean":2e-15,"p10":1e-15,"p90":3e-15}})");
}

}  // namespace

TEST_CASE("empty artifact dir: everything skipped, overall fail") {
    const fs::path root = fs::temp_directory_path() / "pfnn_report_empty";
    fs::remove_all(root);
    fs::create_directories(root);
    const auto report = build_report(root.string());
    CHECK(report.records.size() >= 8);
    for (const auto& r : report.records) CHECK(r.skipped);
    CHECK_FALSE(report.overall_pass);
    CHECK_FALSE(report.missing_artifacts.empty());
}

TEST_CASE("complete passing artifacts") {
    const fs::path root = fs::temp_directory_path() / "pfnn_report_pass";
    fs::remove_all(root);
    write_passing_artifacts(root);
    const auto report = build_report(root.string());
    CHECK(report.records.size() >= 8);
    for (const auto& r : report.records) {
        INFO(r.name);
        CHECK_FALSE(r.skipped);
        CHECK(r.pass);
    }
    CHECK(report.overall_pass);

    // json round trip carries every record
    const auto j = nlohmann::json::parse(report.to_json());
    CHECK(j["overall_pass"].get<bool>());
    CHECK(j["records"].size() == report.records.size());
    CHECK(report.summary_text().find("OVERALL PASS") != std::string::npos);
}

TEST_CASE("a failing measurement fails the report") {
    const fs::path root = fs::temp_directory_path() / "pfnn_report_fail";
    fs::remove_all(root);
    write_passing_artifacts(root);
    write(root / "poisson-ex1" / "report.json",
          R"({"mae_interior":1e-4,"linf_interior":1e-3,"mae_boundary":1e-3,
              "linf_boundary":5e-3,"bound_interior":1e-2,"bound_boundary":1e-10})");
    const auto report = build_report(root.string());
    bool found = false;
    for (const auto& r : report.records)
        if (r.name == "poisson_boundary_mae") {
            CHECK_FALSE(r.pass);
            found = true;
        }
    CHECK(found);
    CHECK_FALSE(report.overall_pass);
    CHECK(report.summary_text().find("FAIL") != std::string::npos);
}

TEST_CASE("density-norm records use relative tolerance and ordering") {
    const fs::path root = fs::temp_directory_path() / "pfnn_report_beta";
    fs::remove_all(root);
    write_passing_artifacts(root);
    const auto report = build_report(root.string());
    for (const auto& r : report.records) {
        if (r.name == "beta_norm_M20") {
            CHECK(r.semantics == "relative");
            CHECK(r.pass);  // 1.04435 within 1e-3 of 1.0442995
        }
        if (r.name == "beta_norm_difference_positive") {
            CHECK(r.pass);
            CHECK(r.measured > 0.0);
        }
    }
}
