#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mchain/statistics.hpp"
#include "mchain/trajectory.hpp"

namespace mchain {

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// Time series: header `t,S_ell4,S_ell8,...,E,n_j0`, one row per sample.
void write_series_csv(const TrajectoryRecord& record, std::ostream& out);
// One JumpEvent per line: t, site, tau, dS_qj, dS_nH, dE_qj, outcome[, skipped].
void write_events_jsonl(const TrajectoryRecord& record, std::ostream& out);

void write_record(const TrajectoryRecord& record, const std::filesystem::path& csv,
                  const std::filesystem::path& jsonl);

// Loads a record back; fingerprint/protocol/seed come from the caller (manifest).
TrajectoryRecord read_record(const std::filesystem::path& csv, const std::filesystem::path& jsonl);
TrajectoryRecord read_record(std::istream& csv, std::istream& jsonl);

// Debug dump of the orbital matrix: `site,orbital,re,im` rows.
void write_state_csv(const GaussianState& state, std::ostream& out);

nlohmann::ordered_json to_json(const Histogram& h);
nlohmann::ordered_json to_json(const ScalarSeries& s);
nlohmann::ordered_json to_json(const LinearFit& f);
nlohmann::ordered_json to_json(const EnsembleSummary& s);

// Histogram as CSV: `left,right,count,density`.
void write_histogram_csv(const Histogram& h, std::ostream& out);
// Series as CSV: `x,y[,err][,n]`.
void write_series_csv(const ScalarSeries& s, std::ostream& out);

}  // namespace mchain
