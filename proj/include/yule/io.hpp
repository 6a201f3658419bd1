#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "yule/estimators.hpp"
#include "yule/hypothesis.hpp"
#include "yule/mc.hpp"

namespace yule {

nlohmann::json to_json(const YuleStatistics& stats);
nlohmann::json to_json(const TestOutcome& outcome);
nlohmann::json to_json(const ConfidenceInterval& ci);
nlohmann::json to_json(const MultiModeOutcome& outcome);
nlohmann::json to_json(const McReport& report);
nlohmann::json to_json(const RateEstimate& rate);

struct PairSeries {
    SamplePath x1;
    SamplePath x2;
};

// Reads the "t,x1,x2" format. Lines starting with '#' are skipped. The time
// column must start at 0 and be uniform. Throws ParseError.
PairSeries read_pair_csv(std::istream& in);

// One line of the batch test output.
struct OutcomeRow {
    TestOutcome outcome;
    double theta;
    double r;
    double horizon;
};

inline constexpr const char* kOutcomeCsvHeader = "variant,alpha,theta,r,T,statistic,threshold,reject";
inline constexpr const char* kMcCsvHeader = "theta,r,T,n,mean,var,k3,k4,d_kol,reject_rate,ci_lo,ci_hi";

void write_outcome_csv(std::ostream& out, std::span<const OutcomeRow> rows);
void write_mc_csv(std::ostream& out, std::span<const McReport> reports);
void write_mc_jsonl(std::ostream& out, std::span<const McReport> reports);

// Reads the numeric columns written by write_mc_csv.
std::vector<McReport> read_mc_csv(std::istream& in);

// "# config: {...}" header line carrying the effective configuration.
std::string config_comment(const nlohmann::json& config);

}  // namespace yule
