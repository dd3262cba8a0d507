#include "rpmcts/plot.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rpmcts/aggregation.hpp"
#include "rpmcts/metrics.hpp"

namespace rpmcts {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 70.0;

constexpr std::array<const char*, 6> kColors{"#1f77b4", "#ff7f0e", "#2ca02c",
                                             "#d62728", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Point {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
};

const char* color_for(const std::string& strategy) {
  std::size_t i = 0;
  for (StrategyKind k : kAllStrategies) {
    if (strategy_name(k) == strategy) return kColors[i];
    ++i;
  }
  return "#7f7f7f";
}

}  // namespace

std::string render_svg(const std::string& env, const std::vector<EpisodeRecord>& records,
                       const PlotAxis& axis, std::vector<std::string>* warnings) {
  std::vector<EpisodeRecord> mine;
  for (const auto& r : records) {
    if (r.env == env) mine.push_back(r);
  }
  if (mine.empty()) throw std::runtime_error("no records for environment " + env);
  const auto cells = summarize(mine);

  std::set<int> budget_set;
  std::vector<std::string> strategies;  // canonical order via summarize()
  std::map<std::string, std::map<int, Point>> series;
  for (const auto& c : cells) {
    budget_set.insert(c.trial_budget);
    if (std::find(strategies.begin(), strategies.end(), c.strategy) == strategies.end()) {
      strategies.push_back(c.strategy);
    }
    Point p;
    if (axis.metric == PrimaryMetric::kSteps) {
      p.mean = transformed_steps(c.steps.mean, axis.plot_constant);
      p.low = transformed_steps(c.steps.ci_high, axis.plot_constant);
      p.high = transformed_steps(c.steps.ci_low, axis.plot_constant);
    } else {
      p.mean = p.low = p.high = 100.0 * c.success_rate;
    }
    series[c.strategy][c.trial_budget] = p;
  }
  std::sort(strategies.begin(), strategies.end(), [](const std::string& a, const std::string& b) {
    auto order = [](const std::string& s) {
      int i = 0;
      for (StrategyKind k : kAllStrategies) {
        if (strategy_name(k) == s) return i;
        ++i;
      }
      return i;
    };
    return std::make_pair(order(a), a) < std::make_pair(order(b), b);
  });
  const std::vector<int> budgets(budget_set.begin(), budget_set.end());

  for (const auto& s : strategies) {
    for (int b : budgets) {
      if (!series[s].contains(b) && warnings != nullptr) {
        warnings->push_back(env + ": no results for " + s + " at " + std::to_string(b) + " trials");
      }
    }
  }

  double y_min = 1e300;
  double y_max = -1e300;
  for (const auto& [s, pts] : series) {
    for (const auto& [b, p] : pts) {
      y_min = std::min(y_min, p.low);
      y_max = std::max(y_max, p.high);
    }
  }
  if (y_max - y_min < 1e-9) {
    y_min -= 1.0;
    y_max += 1.0;
  }
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_of = [&](std::size_t i) {
    return budgets.size() == 1 ? kLeft + plot_w / 2.0
                               : kLeft + plot_w * static_cast<double>(i) / static_cast<double>(budgets.size() - 1);
  };
  auto y_of = [&](double v) { return kTop + plot_h * (y_max - v) / (y_max - y_min); };

  const std::string y_label = axis.metric == PrimaryMetric::kSteps
                                  ? "steps metric (" + num(axis.plot_constant) + " - steps)"
                                  : "success rate (%)";

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << env << "</text>\n";
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(plot_w)
      << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int t = 0; t <= 4; ++t) {
    const double v = y_min + (y_max - y_min) * t / 4.0;
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y_of(v) + 4)
        << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
  }
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    svg << "<text x=\"" << num(x_of(i)) << "\" y=\"" << num(kTop + plot_h + 16)
        << "\" text-anchor=\"middle\">" << budgets[i] << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kTop + plot_h + 34)
      << "\" text-anchor=\"middle\">trials per worker</text>\n";
  svg << "<text transform=\"translate(16," << num(kTop + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << y_label << "</text>\n";

  for (const auto& s : strategies) {
    const char* color = color_for(s);
    const auto& pts = series[s];
    // Contiguous runs of budgets; a missing budget breaks the line and band.
    std::vector<std::vector<std::size_t>> runs(1);
    for (std::size_t i = 0; i < budgets.size(); ++i) {
      if (pts.contains(budgets[i])) {
        runs.back().push_back(i);
      } else if (!runs.back().empty()) {
        runs.emplace_back();
      }
    }
    for (const auto& run : runs) {
      if (run.empty()) continue;
      if (axis.metric == PrimaryMetric::kSteps && run.size() > 1) {
        svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
        for (std::size_t i : run) svg << num(x_of(i)) << ',' << num(y_of(pts.at(budgets[i]).high)) << ' ';
        for (auto it = run.rbegin(); it != run.rend(); ++it) {
          svg << num(x_of(*it)) << ',' << num(y_of(pts.at(budgets[*it]).low)) << ' ';
        }
        svg << "\"/>\n";
      }
      if (run.size() > 1) {
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i : run) svg << num(x_of(i)) << ',' << num(y_of(pts.at(budgets[i]).mean)) << ' ';
        svg << "\"/>\n";
      }
      for (std::size_t i : run) {
        const Point& p = pts.at(budgets[i]);
        if (axis.metric == PrimaryMetric::kSteps) {
          svg << "<line x1=\"" << num(x_of(i)) << "\" y1=\"" << num(y_of(p.low)) << "\" x2=\""
              << num(x_of(i)) << "\" y2=\"" << num(y_of(p.high)) << "\" stroke=\"" << color << "\"/>\n";
        }
        svg << "<circle cx=\"" << num(x_of(i)) << "\" cy=\"" << num(y_of(p.mean)) << "\" r=\"3\" fill=\""
            << color << "\"/>\n";
      }
    }
  }

  double ly = kTop + 10;
  for (const auto& s : strategies) {
    svg << "<rect x=\"" << num(kWidth - kRight + 15) << "\" y=\"" << num(ly - 9) << "\" width=\"12\" height=\"12\" fill=\""
        << color_for(s) << "\"/>\n";
    svg << "<text x=\"" << num(kWidth - kRight + 32) << "\" y=\"" << num(ly + 1) << "\">" << s << "</text>\n";
    ly += 20;
  }
  if (axis.metric == PrimaryMetric::kSteps) {
    svg << "<text x=\"" << num(kLeft) << "\" y=\"" << num(kHeight - 10)
        << "\" font-size=\"10\">plotted value = " << num(axis.plot_constant)
        << " (max episode steps) - mean steps; bands: 95% normal CI over seeds</text>\n";
  } else {
    svg << "<text x=\"" << num(kLeft) << "\" y=\"" << num(kHeight - 10)
        << "\" font-size=\"10\">success rate over all seeds (no CI)</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

PlotOutput emit_plots(const std::vector<EpisodeRecord>& records,
                      const std::function<PlotAxis(const std::string& env)>& axis_for,
                      const std::filesystem::path& out_dir) {
  if (records.empty()) throw std::runtime_error("no results to plot");
  std::vector<std::string> envs;
  for (const auto& r : records) {
    if (std::find(envs.begin(), envs.end(), r.env) == envs.end()) envs.push_back(r.env);
  }
  std::sort(envs.begin(), envs.end());

  PlotOutput out;
  std::vector<std::pair<std::filesystem::path, std::string>> rendered;
  for (const auto& env : envs) {
    rendered.emplace_back(out_dir / (env + ".svg"), render_svg(env, records, axis_for(env), &out.warnings));
  }
  std::filesystem::create_directories(out_dir);
  for (const auto& [path, text] : rendered) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << text;
    out.files.push_back(path);
  }
  return out;
}

}  // namespace rpmcts
