#include "trimix/training/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "trimix/error.hpp"

namespace trimix {

namespace {

using u128 = unsigned __int128;

struct Overflow {};

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u128 mul(u128 a, u128 b) {
  u128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}

u128 plus(u128 a, u128 b) {
  u128 r;
  if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
  return r;
}

// Non-negative fraction kept in lowest terms.
struct Ratio {
  u128 num = 0;
  u128 den = 1;

  static Ratio of(u128 n, u128 d) {
    if (d == 0) return {};
    const u128 g = gcd128(n, d);
    return g == 0 ? Ratio{} : Ratio{n / g, d / g};
  }

  Ratio& operator+=(const Ratio& o) {
    const u128 g = gcd128(den, o.den);
    const u128 l = mul(den / g, o.den);
    *this = of(plus(mul(num, l / den), mul(o.num, l / o.den)), l);
    return *this;
  }

  Ratio over(u128 d) const { return of(num, mul(den, d)); }

  // Correctly rounded value of a ratio in [0, 1].
  double value() const {
    if (num == 0) return 0.0;
    if (num >= den) return static_cast<double>(num / den);
    std::uint64_t m = 0;
    int shift = 0;
    u128 r = num;
    while (m < (std::uint64_t{1} << 63)) {
      r <<= 1;
      m <<= 1;
      if (r >= den) {
        r -= den;
        m |= 1;
      }
      ++shift;
    }
    if (r != 0) m |= 1;  // sticky bit sits far below the rounding position
    return std::ldexp(static_cast<double>(m), -shift);
  }
};

struct Counts {
  std::vector<std::uint64_t> tp, support, predicted;
  std::uint64_t total = 0;
};

Counts count(const std::vector<std::vector<std::uint64_t>>& c) {
  const std::size_t k = c.size();
  Counts n{std::vector<std::uint64_t>(k), std::vector<std::uint64_t>(k), std::vector<std::uint64_t>(k), 0};
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t p = 0; p < k; ++p) {
      n.support[t] += c[t][p];
      n.predicted[p] += c[t][p];
      n.total += c[t][p];
    }
    n.tp[t] = c[t][t];
  }
  return n;
}

void fill_exact(MetricsReport& r, const Counts& n) {
  Ratio wp, wr, wf;
  for (std::size_t i = 0; i < n.tp.size(); ++i) {
    const u128 tp = n.tp[i], s = n.support[i], p = n.predicted[i];
    const Ratio prec = Ratio::of(tp, p), rec = Ratio::of(tp, s), f1 = Ratio::of(2 * tp, s + p);
    r.per_class[i].precision = prec.value();
    r.per_class[i].recall = rec.value();
    r.per_class[i].f1 = f1.value();
    wp += Ratio::of(mul(prec.num, s), prec.den);
    wr += Ratio::of(mul(rec.num, s), rec.den);
    wf += Ratio::of(mul(f1.num, s), f1.den);
  }
  std::uint64_t correct = 0;
  for (auto t : n.tp) correct += t;
  r.accuracy = Ratio::of(correct, n.total).value();
  r.weighted_precision = wp.over(n.total).value();
  r.weighted_recall = wr.over(n.total).value();
  r.weighted_f1 = wf.over(n.total).value();
}

// Only reached when a fraction no longer fits 128 bits.
void fill_approx(MetricsReport& r, const Counts& n) {
  long double wp = 0, wf = 0, correct = 0;
  const auto ratio = [](long double a, long double b) { return b == 0 ? 0.0L : a / b; };
  for (std::size_t i = 0; i < n.tp.size(); ++i) {
    const long double tp = n.tp[i], s = n.support[i], p = n.predicted[i];
    r.per_class[i].precision = static_cast<double>(ratio(tp, p));
    r.per_class[i].recall = static_cast<double>(ratio(tp, s));
    r.per_class[i].f1 = static_cast<double>(ratio(2 * tp, s + p));
    wp += s * ratio(tp, p);
    wf += s * ratio(2 * tp, s + p);
    correct += tp;
  }
  r.accuracy = static_cast<double>(correct / n.total);
  r.weighted_recall = r.accuracy;  // sum_i s_i * tp_i / s_i is exactly sum_i tp_i
  r.weighted_precision = static_cast<double>(wp / n.total);
  r.weighted_f1 = static_cast<double>(wf / n.total);
}

nlohmann::ordered_json number_2dp(double x) { return nlohmann::ordered_json::parse(two_decimals(x)); }

}  // namespace

MetricsReport metrics_from_confusion(const std::vector<std::vector<std::uint64_t>>& confusion,
                                     const std::vector<std::string>& labels) {
  const std::size_t k = confusion.size();
  if (k == 0) throw ConfigError("confusion matrix is empty");
  for (const auto& row : confusion) {
    if (row.size() != k) throw ConfigError("confusion matrix is not square");
  }
  if (!labels.empty() && labels.size() != k) throw ConfigError("label names do not match the confusion matrix");
  const Counts n = count(confusion);
  if (n.total == 0) throw ConfigError("cannot compute metrics over an empty test set");

  MetricsReport r;
  r.confusion = confusion;
  r.per_class.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    r.per_class[i].label = labels.empty() ? std::to_string(i) : labels[i];
    r.per_class[i].support = n.support[i];
  }
  try {
    fill_exact(r, n);
  } catch (const Overflow&) {
    fill_approx(r, n);
  }
  return r;
}

std::vector<std::vector<std::uint64_t>> confusion_matrix(std::span<const int> truth, std::span<const int> predicted,
                                                         std::size_t classes) {
  if (truth.size() != predicted.size()) throw ConfigError("truth and prediction counts differ");
  std::vector<std::vector<std::uint64_t>> c(classes, std::vector<std::uint64_t>(classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i], p = predicted[i];
    if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= classes || static_cast<std::size_t>(p) >= classes) {
      throw ConfigError("label id outside [0, " + std::to_string(classes) + ")");
    }
    ++c[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
  }
  return c;
}

std::string report_json(const MetricsReport& r) {
  nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
  for (const auto& c : r.per_class) {
    per_class.push_back(
        {{"label", c.label}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}});
  }
  nlohmann::ordered_json j{{"name", r.name},
                           {"accuracy", r.accuracy},
                           {"weighted_f1", r.weighted_f1},
                           {"weighted_precision", r.weighted_precision},
                           {"weighted_recall", r.weighted_recall},
                           {"wall_minutes", r.wall_minutes},
                           {"per_class", per_class},
                           {"confusion", r.confusion}};
  return j.dump(2) + "\n";
}

MetricsReport parse_report_json(const std::string& text, const std::string& source) {
  try {
    const auto j = nlohmann::json::parse(text);
    MetricsReport r;
    r.name = j.value("name", std::string());
    r.accuracy = j.at("accuracy").get<double>();
    r.weighted_f1 = j.at("weighted_f1").get<double>();
    r.weighted_precision = j.at("weighted_precision").get<double>();
    r.weighted_recall = j.at("weighted_recall").get<double>();
    r.wall_minutes = j.value("wall_minutes", 0.0);
    for (const auto& c : j.value("per_class", nlohmann::json::array())) {
      r.per_class.push_back({c.at("label").get<std::string>(), c.at("precision").get<double>(),
                             c.at("recall").get<double>(), c.at("f1").get<double>(),
                             c.at("support").get<std::uint64_t>()});
    }
    r.confusion = j.value("confusion", std::vector<std::vector<std::uint64_t>>{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(source + ": not a metrics report: " + e.what());
  }
}

std::string two_decimals(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

ComparisonTable compare_reports(std::vector<MetricsReport> reports) {
  if (reports.empty()) throw ConfigError("report needs at least one metrics file");
  std::set<std::string> seen;
  for (const auto& r : reports) {
    if (!seen.insert(r.name).second) throw ConfigError("duplicate report name '" + r.name + "'");
  }
  std::stable_sort(reports.begin(), reports.end(), [](const MetricsReport& a, const MetricsReport& b) {
    if (a.weighted_f1 != b.weighted_f1) return a.weighted_f1 < b.weighted_f1;
    return a.name < b.name;
  });

  std::string md = "| Model | Accuracy | Weighted F1-Score | Precision | Recall | Time (Min) |\n";
  md += "|---|---|---|---|---|---|\n";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    md += "| " + r.name + " | " + two_decimals(r.accuracy) + " | " + two_decimals(r.weighted_f1) + " | " +
          two_decimals(r.weighted_precision) + " | " + two_decimals(r.weighted_recall) + " | " +
          two_decimals(r.wall_minutes) + " |\n";
    rows.push_back({{"model", r.name},
                    {"accuracy", number_2dp(r.accuracy)},
                    {"weighted_f1", number_2dp(r.weighted_f1)},
                    {"precision", number_2dp(r.weighted_precision)},
                    {"recall", number_2dp(r.weighted_recall)},
                    {"time_min", number_2dp(r.wall_minutes)}});
  }
  return {md, rows.dump(2) + "\n"};
}

}  // namespace trimix
