#include "mchain/record_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mchain {

using nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("record: cannot parse number '" + s + "'");
  return v;
}

}  // namespace

void write_series_csv(const TrajectoryRecord& r, std::ostream& out) {
  out << 't';
  for (int ell : r.ells) out << ",S_ell" << ell;
  out << ",E,n_j0\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    out << format_double(r.times[i]);
    for (const auto& s : r.entropy) out << ',' << format_double(s[i]);
    out << ',' << format_double(r.energy[i]) << ',' << format_double(r.occupation[i]) << '\n';
  }
}

void write_events_jsonl(const TrajectoryRecord& r, std::ostream& out) {
  for (const auto& e : r.events) {
    ordered_json j;
    j["t"] = e.time;
    j["site"] = e.site;
    j["tau"] = e.tau;
    j["dS_qj"] = e.dS_qj;
    j["dS_nH"] = e.dS_nH;
    j["dE_qj"] = e.dE_qj;
    j["outcome"] = e.outcome;
    if (e.skipped) j["skipped"] = true;
    out << j.dump() << '\n';
  }
}

void write_record(const TrajectoryRecord& record, const std::filesystem::path& csv,
                  const std::filesystem::path& jsonl) {
  std::ofstream c(csv, std::ios::binary);
  std::ofstream j(jsonl, std::ios::binary);
  if (!c || !j) throw ConfigError("record: cannot write " + csv.string());
  write_series_csv(record, c);
  write_events_jsonl(record, j);
}

TrajectoryRecord read_record(std::istream& csv, std::istream& jsonl) {
  TrajectoryRecord r;
  std::string line;
  if (!std::getline(csv, line)) throw ConfigError("record: empty series file");
  const auto header = split(line, ',');
  if (header.size() < 3 || header.front() != "t" || header[header.size() - 2] != "E" ||
      header.back() != "n_j0")
    throw ConfigError("record: unexpected series header '" + line + "'");
  for (std::size_t i = 1; i + 2 < header.size(); ++i) {
    if (header[i].rfind("S_ell", 0) != 0) throw ConfigError("record: bad column " + header[i]);
    r.ells.push_back(std::stoi(header[i].substr(5)));
  }
  r.entropy.resize(r.ells.size());
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw ConfigError("record: ragged series row");
    r.times.push_back(parse_double(cells[0]));
    for (std::size_t i = 0; i < r.ells.size(); ++i) r.entropy[i].push_back(parse_double(cells[i + 1]));
    r.energy.push_back(parse_double(cells[cells.size() - 2]));
    r.occupation.push_back(parse_double(cells.back()));
  }
  while (std::getline(jsonl, line)) {
    if (line.empty()) continue;
    JumpEvent e;
    try {
      const auto j = nlohmann::json::parse(line);
      e.time = j.at("t").get<double>();
      e.site = j.at("site").get<int>();
      e.tau = j.at("tau").get<double>();
      e.dS_qj = j.at("dS_qj").get<double>();
      e.dS_nH = j.at("dS_nH").get<double>();
      e.dE_qj = j.at("dE_qj").get<double>();
      e.outcome = j.at("outcome").get<int>();
      e.skipped = j.value("skipped", false);
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(std::string("record: bad event line: ") + ex.what());
    }
    r.events.push_back(e);
  }
  return r;
}

TrajectoryRecord read_record(const std::filesystem::path& csv, const std::filesystem::path& jsonl) {
  std::ifstream c(csv), j(jsonl);
  if (!c) throw ConfigError("record: cannot open " + csv.string());
  if (!j) throw ConfigError("record: cannot open " + jsonl.string());
  return read_record(c, j);
}

void write_state_csv(const GaussianState& state, std::ostream& out) {
  out << "site,orbital,re,im\n";
  const CMatrix& U = state.orbitals();
  for (Eigen::Index i = 0; i < U.rows(); ++i)
    for (Eigen::Index k = 0; k < U.cols(); ++k)
      out << i << ',' << k << ',' << format_double(U(i, k).real()) << ','
          << format_double(U(i, k).imag()) << '\n';
}

ordered_json to_json(const Histogram& h) {
  ordered_json j;
  j["n"] = h.n;
  j["mean"] = h.mean;
  j["stddev"] = h.stddev;
  j["m3"] = h.m3;
  j["stderr_mean"] = h.stderr_mean;
  j["out_of_range"] = h.out_of_range;
  j["edges"] = h.edges;
  j["counts"] = h.counts;
  j["density"] = h.density;
  return j;
}

ordered_json to_json(const ScalarSeries& s) {
  ordered_json j;
  j["x"] = s.x;
  j["y"] = s.y;
  if (!s.err.empty()) j["err"] = s.err;
  if (!s.n.empty()) j["n"] = s.n;
  return j;
}

ordered_json to_json(const LinearFit& f) {
  ordered_json j;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["slope_err"] = f.slope_err;
  j["r2"] = f.r2;
  j["adj_r2"] = f.adj_r2;
  j["points"] = f.points;
  return j;
}

ordered_json to_json(const EnsembleSummary& s) {
  ordered_json j;
  j["fingerprint"] = s.fingerprint;
  j["trajectories"] = s.count;
  j["times"] = s.times;
  ordered_json ent = ordered_json::object();
  for (std::size_t i = 0; i < s.ells.size(); ++i) {
    ordered_json e;
    e["mean"] = s.entropy_mean(i);
    e["stderr"] = s.entropy_stderr(i);
    ent[std::to_string(s.ells[i])] = e;
  }
  j["entropy"] = ent;
  j["energy"] = {{"mean", s.energy.mean}, {"stderr", s.energy.stderr_of_mean(s.count)}};
  j["occupation"] = {{"mean", s.occupation.mean}, {"stderr", s.occupation.stderr_of_mean(s.count)}};
  return j;
}

void write_histogram_csv(const Histogram& h, std::ostream& out) {
  out << "left,right,count,density\n";
  for (std::size_t i = 0; i < h.bins(); ++i)
    out << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ',' << h.counts[i]
        << ',' << format_double(h.density[i]) << '\n';
}

void write_series_csv(const ScalarSeries& s, std::ostream& out) {
  out << "x,y";
  if (!s.err.empty()) out << ",err";
  if (!s.n.empty()) out << ",n";
  out << '\n';
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    out << format_double(s.x[i]) << ',' << format_double(s.y[i]);
    if (!s.err.empty()) out << ',' << format_double(s.err[i]);
    if (!s.n.empty()) out << ',' << s.n[i];
    out << '\n';
  }
}

}  // namespace mchain
