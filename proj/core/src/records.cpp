#include "rpmcts/records.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rpmcts {

namespace {

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_csv_header(std::ostream& out, bool with_delta) {
  out << kCsvHeader << (with_delta ? ",delta_trials" : "") << '\n';
}

std::string metric_columns(const EpisodeRecord& r) {
  std::ostringstream out;
  out << r.env << ',' << r.strategy << ',' << r.trial_budget << ',' << r.seed << ',' << r.steps << ','
      << (r.success ? 1 : 0) << ',' << format_double(r.final_return, "%.10g");
  return out.str();
}

void write_csv_row(std::ostream& out, const EpisodeRecord& r, bool with_delta) {
  out << metric_columns(r) << ',' << format_double(r.inference_seconds, "%.6e") << ','
      << format_double(r.total_seconds, "%.6e");
  if (with_delta) out << ',' << r.delta_trials.value_or(0);
  out << '\n';
}

std::vector<EpisodeRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("results file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const bool with_delta = line == std::string(kCsvHeader) + ",delta_trials";
  if (line != kCsvHeader && !with_delta) {
    throw std::runtime_error("unexpected results header: " + line);
  }
  const std::size_t columns = with_delta ? 10 : 9;

  std::vector<EpisodeRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != columns) {
      throw std::runtime_error("results line " + std::to_string(line_no) + ": expected " +
                               std::to_string(columns) + " columns");
    }
    try {
      EpisodeRecord r;
      r.env = f[0];
      r.strategy = f[1];
      r.trial_budget = std::stoi(f[2]);
      r.seed = std::stoll(f[3]);
      r.steps = std::stoi(f[4]);
      r.success = std::stoi(f[5]) != 0;
      r.final_return = std::stod(f[6]);
      r.inference_seconds = std::stod(f[7]);
      r.total_seconds = std::stod(f[8]);
      if (with_delta) r.delta_trials = std::stoi(f[9]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error("results line " + std::to_string(line_no) + ": malformed field");
    }
  }
  return out;
}

std::vector<EpisodeRecord> read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file " + path);
  return read_csv(in);
}

}  // namespace rpmcts
