#include "colsel/report_json.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "colsel/error.hpp"
#include "colsel/matrix_io.hpp"

namespace colsel {

using nlohmann::json;

json report_to_json(const SelectionReport& report) {
  json j;
  const BudgetParams& p = report.params;
  j["params"] = {
      {"epsilon", p.epsilon},     {"p", p.p},
      {"n", report.n},            {"opnorm_sq", p.opnorm_sq},
      {"R", p.R},                 {"delta", p.delta},
      {"cert_tol", report.cert_tol}, {"auto_normalized", report.auto_normalized},
  };
  j["selected"] = report.selected;
  j["trajectory"] = report.trajectory;

  json scores = json::array();
  for (const auto& s : report.scores) {
    scores.push_back({{"r", s.step},
                      {"chosen", s.chosen},
                      {"score", s.chosen_score},
                      {"mean_score", s.mean_score},
                      {"candidates", s.candidates}});
  }
  j["scores"] = std::move(scores);

  json envelopes = json::array();
  for (const auto& c : report.envelope_checks) {
    envelopes.push_back({{"k", c.k},
                         {"r", c.r},
                         {"lambda", c.lambda},
                         {"lower", c.lower},
                         {"upper", c.upper},
                         {"lower_margin", c.lambda - c.lower},
                         {"upper_margin", c.upper - c.lambda},
                         {"pass", c.pass}});
  }
  j["envelope_checks"] = std::move(envelopes);

  json interlacing = json::array();
  for (const auto& c : report.interlacing_checks) {
    interlacing.push_back(
        {{"r", c.step}, {"pass", c.pass}, {"secular_deviation", c.secular_deviation}});
  }
  j["interlacing_checks"] = std::move(interlacing);

  j["final_extremes"] = {{"lambda_min", report.lambda_min}, {"lambda_max", report.lambda_max}};
  j["certified"] = report.certified;
  j["versions"] = {{"colsel", kToolVersion}, {"report_schema", kReportSchemaVersion}};
  return j;
}

SelectionReport report_from_json(const json& j) {
  try {
    SelectionReport report;
    const json& p = j.at("params");
    report.params.epsilon = p.at("epsilon").get<double>();
    report.params.p = p.at("p").get<std::size_t>();
    report.n = p.at("n").get<std::size_t>();
    report.params.opnorm_sq = p.at("opnorm_sq").get<double>();
    report.params.R = p.at("R").get<std::size_t>();
    report.params.delta = p.at("delta").get<double>();
    report.cert_tol = p.at("cert_tol").get<double>();
    report.auto_normalized = p.at("auto_normalized").get<bool>();
    report.selected = j.at("selected").get<std::vector<std::size_t>>();
    report.trajectory = j.at("trajectory").get<std::vector<std::vector<double>>>();
    for (const json& s : j.at("scores")) {
      report.scores.push_back({s.at("r").get<std::size_t>(), s.at("chosen").get<std::size_t>(),
                               s.at("score").get<double>(), s.at("mean_score").get<double>(),
                               s.at("candidates").get<std::size_t>()});
    }
    for (const json& c : j.at("envelope_checks")) {
      report.envelope_checks.push_back({c.at("k").get<std::size_t>(), c.at("r").get<std::size_t>(),
                                        c.at("lambda").get<double>(), c.at("lower").get<double>(),
                                        c.at("upper").get<double>(), c.at("pass").get<bool>()});
    }
    for (const json& c : j.at("interlacing_checks")) {
      report.interlacing_checks.push_back({c.at("r").get<std::size_t>(), c.at("pass").get<bool>(),
                                           c.at("secular_deviation").get<double>()});
    }
    report.lambda_min = j.at("final_extremes").at("lambda_min").get<double>();
    report.lambda_max = j.at("final_extremes").at("lambda_max").get<double>();
    report.certified = j.at("certified").get<bool>();
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed report: ") + e.what());
  }
}

namespace {

void dump_value(std::string& out, const json& j, int depth) {
  auto newline = [&](int d) {
    out += '\n';
    out.append(static_cast<std::size_t>(2 * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(key).dump();
        out += ": ";
        dump_value(out, value, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::ranges::none_of(j, [](const json& v) { return v.is_structured(); });
      out += '[';
      bool first = true;
      for (const json& value : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        dump_value(out, value, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  dump_value(out, j, 0);
  out += '\n';
  return out;
}

void write_report_csv(std::ostream& out, const SelectionReport& report) {
  out << "r,k,lambda,lower,upper,pass\n";
  for (const auto& c : report.envelope_checks) {
    out << c.r << ',' << c.k << ',' << format_double(c.lambda) << ',' << format_double(c.lower)
        << ',' << format_double(c.upper) << ',' << (c.pass ? 1 : 0) << '\n';
  }
}

}  // namespace colsel
