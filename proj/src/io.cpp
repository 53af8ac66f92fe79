#include "jcglasso/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace jcglasso {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, path.string() + ": cannot write file");
  out << text;
  if (!out) throw Error(ErrorKind::ParseError, path.string() + ": write failed");
}

std::string where(const CsvTable& t, std::size_t row, std::size_t col) {
  return t.source + ":" + std::to_string(t.lines[row]) + ":" + std::to_string(col + 1);
}

void expect_header(const CsvTable& t, const std::vector<std::string>& names) {
  if (t.header != names) {
    std::string want;
    for (const auto& n : names) want += (want.empty() ? "" : ",") + n;
    throw Error(ErrorKind::ParseError, t.source + ":1:1: expected header '" + want + "'");
  }
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json scenario_json(const ScenarioConfig& s) {
  return json{{"name", s.name},
              {"k", s.k},
              {"n", s.n},
              {"p", s.p},
              {"q", s.q},
              {"censored_y", s.censored_y()},
              {"missing_x", s.missing_x()},
              {"event_probability", s.event_probability},
              {"censor_value", s.censor_value},
              {"seed", s.seed},
              {"band_step", s.band_step},
              {"band_width", s.band_width},
              {"band_low", s.band_low},
              {"band_high", s.band_high},
              {"b_rows", s.b_rows},
              {"b_low", s.b_low},
              {"b_high", s.b_high},
              {"min_eigenvalue", s.min_eigenvalue}};
}

std::string ratio_label(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

void write_edges(const fs::path& path, const std::vector<Matrix>& mats,
                 const std::vector<std::string>& names, const std::vector<std::string>& conditions,
                 std::size_t k) {
  std::string out = "node_a,node_b,partial_correlation,condition\n";
  const Matrix& m = mats[k];
  for (Index h = 0; h < m.rows(); ++h) {
    for (Index j = h + 1; j < m.cols(); ++j) {
      if (m(h, j) == 0.0) continue;
      const double pc = -m(h, j) / std::sqrt(m(h, h) * m(j, j));
      out += names[h] + "," + names[j] + "," + format_double(pc) + "," + conditions[k] + "\n";
    }
  }
  write_text(path, out);
}

std::string bic_row(const PathPoint& pt) {
  return format_double(pt.bic.x) + "," + format_double(pt.bic.y_given_x) + "," +
         format_double(pt.bic.total) + "," + std::to_string(pt.df.x) + "," +
         std::to_string(pt.df.y_given_x) + "," + (pt.converged ? "true" : "false") + "\n";
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (!have_header) {
      if (lineno != 1) throw Error(ErrorKind::ParseError, source + ":1:1: header row is empty");
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw Error(ErrorKind::ParseError,
                  source + ":" + std::to_string(lineno) + ":1: expected " +
                      std::to_string(t.header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.lines.push_back(lineno);
  }
  if (!have_header) throw Error(ErrorKind::ParseError, source + ":1:1: file is empty");
  return t;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_text(path), path.string()); }

double parse_number(const std::string& token, const std::string& where) {
  std::string s = token;
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "+inf") return kInf;
  if (lower == "-inf") return -kInf;
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end || std::isnan(v)) {
    throw Error(ErrorKind::ParseError, where + ": invalid number '" + token + "'");
  }
  return v;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

VariableRoles read_roles(const fs::path& path) {
  const CsvTable t = read_csv(path);
  expect_header(t, {"variable", "role"});
  VariableRoles r;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& name = t.rows[i][0];
    const auto& role = t.rows[i][1];
    if (name.empty()) throw Error(ErrorKind::ParseError, where(t, i, 0) + ": empty variable name");
    if (!seen.insert(name).second) {
      throw Error(ErrorKind::ParseError, where(t, i, 0) + ": variable '" + name + "' listed twice");
    }
    if (role == "covariate") {
      r.covariates.push_back(name);
    } else if (role == "response") {
      r.responses.push_back(name);
    } else {
      throw Error(ErrorKind::ParseError,
                  where(t, i, 1) + ": role must be 'covariate' or 'response', got '" + role + "'");
    }
  }
  if (r.responses.empty()) {
    throw Error(ErrorKind::ParseError, t.source + ": no response variables declared");
  }
  return r;
}

LimitTable read_limits(const fs::path& path) {
  const CsvTable t = read_csv(path);
  expect_header(t, {"variable", "condition", "lower", "upper"});
  LimitTable out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    const double lo = parse_number(r[2], where(t, i, 2));
    const double hi = parse_number(r[3], where(t, i, 3));
    if (!(lo < hi)) throw Error(ErrorKind::ParseError, where(t, i, 2) + ": lower must be below upper");
    if (!out.emplace(std::make_pair(r[0], r[1]), std::make_pair(lo, hi)).second) {
      throw Error(ErrorKind::ParseError, where(t, i, 0) + ": limits for variable '" + r[0] +
                                             "' in condition '" + r[1] + "' given twice");
    }
  }
  return out;
}

InputData load_data(const std::vector<fs::path>& files, const VariableRoles& roles,
                    const LimitTable* limits, bool censor_at_limits) {
  if (files.empty()) throw Error(ErrorKind::ParseError, "no data files given");
  if (censor_at_limits && limits == nullptr) {
    const std::string first = roles.covariates.empty() ? roles.responses.front()
                                                       : roles.covariates.front();
    throw Error(ErrorKind::ParseError,
                "censoring at limits needs a limits file; no limits for variable '" + first + "'");
  }
  InputData out;
  out.variables = roles;
  std::vector<std::string> names = roles.covariates;
  names.insert(names.end(), roles.responses.begin(), roles.responses.end());
  const Index q = static_cast<Index>(roles.covariates.size());
  const Index d = static_cast<Index>(names.size());

  for (const auto& file : files) {
    const std::string cond = file.stem().string();
    if (std::find(out.conditions.begin(), out.conditions.end(), cond) != out.conditions.end()) {
      throw Error(ErrorKind::ParseError, file.string() + ": condition '" + cond + "' given twice");
    }
    const CsvTable t = read_csv(file);
    std::map<std::string, std::size_t> column;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (!column.emplace(t.header[c], c).second) {
        throw Error(ErrorKind::ParseError, t.source + ":1:" + std::to_string(c + 1) +
                                               ": column '" + t.header[c] + "' appears twice");
      }
      if (std::find(names.begin(), names.end(), t.header[c]) == names.end()) {
        throw Error(ErrorKind::ParseError, t.source + ":1:" + std::to_string(c + 1) +
                                               ": variable '" + t.header[c] + "' has no role");
      }
    }
    for (const auto& n : names) {
      if (!column.count(n)) {
        throw Error(ErrorKind::ShapeError,
                    "condition '" + cond + "': variable '" + n + "' is missing from " + t.source);
      }
    }
    const Index n = static_cast<Index>(t.rows.size());
    if (n == 0) throw Error(ErrorKind::ShapeError, "condition '" + cond + "' has no observations");

    ConditionDataset ds;
    ds.x = Matrix(n, q);
    ds.y = Matrix(n, d - q);
    ds.status = StatusGrid(n, d);
    ds.lower = Vector::Constant(d, -kInf);
    ds.upper = Vector::Constant(d, kInf);
    for (Index j = 0; j < d; ++j) {
      const std::string& var = names[static_cast<std::size_t>(j)];
      const auto it = limits ? limits->find({var, cond}) : LimitTable::const_iterator{};
      if (limits && it != limits->end()) {
        ds.lower(j) = it->second.first;
        ds.upper(j) = it->second.second;
      } else if (censor_at_limits) {
        throw Error(ErrorKind::ParseError,
                    "no limits for variable '" + var + "' in condition '" + cond + "'");
      }
    }
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) {
        const std::size_t c = column[names[static_cast<std::size_t>(j)]];
        const std::string& tok = t.rows[static_cast<std::size_t>(i)][c];
        double v;
        CellStatus st = CellStatus::Observed;
        if (tok == "NA") {
          v = std::numeric_limits<double>::quiet_NaN();
          st = CellStatus::MissingAtRandom;
        } else {
          v = parse_number(tok, where(t, static_cast<std::size_t>(i), c));
          if (!std::isfinite(v)) {
            throw Error(ErrorKind::ParseError,
                        where(t, static_cast<std::size_t>(i), c) + ": cell values must be finite");
          }
          if (censor_at_limits) {
            if (v == ds.lower(j)) {
              st = CellStatus::LeftCensored;
            } else if (v == ds.upper(j)) {
              st = CellStatus::RightCensored;
            } else if (v < ds.lower(j) || v > ds.upper(j)) {
              throw Error(ErrorKind::ParseError, where(t, static_cast<std::size_t>(i), c) +
                                                     ": value outside the limits of '" +
                                                     names[static_cast<std::size_t>(j)] + "'");
            }
          }
        }
        if (j < q) {
          ds.x(i, j) = v;
        } else {
          ds.y(i, j - q) = v;
        }
        ds.status(i, j) = st;
      }
    }
    try {
      ds.validate();
    } catch (const Error& e) {
      throw Error(e.kind(), "condition '" + cond + "': " + e.what());
    }
    out.conditions.push_back(cond);
    out.datasets.push_back(std::move(ds));
  }
  return out;
}

void write_dataset(const fs::path& path, const ConditionDataset& data,
                   const VariableRoles& variables) {
  std::string out;
  std::vector<std::string> names = variables.covariates;
  names.insert(names.end(), variables.responses.begin(), variables.responses.end());
  for (std::size_t j = 0; j < names.size(); ++j) out += (j ? "," : "") + names[j];
  out += "\n";
  const Matrix z = data.joint();
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = 0; j < z.cols(); ++j) {
      if (j) out += ",";
      out += data.status(i, j) == CellStatus::MissingAtRandom ? "NA" : format_double(z(i, j));
    }
    out += "\n";
  }
  write_text(path, out);
}

void write_roles(const fs::path& path, const VariableRoles& variables) {
  std::string out = "variable,role\n";
  for (const auto& v : variables.covariates) out += v + ",covariate\n";
  for (const auto& v : variables.responses) out += v + ",response\n";
  write_text(path, out);
}

void write_limits(const fs::path& path, const InputData& data) {
  std::string out = "variable,condition,lower,upper\n";
  std::vector<std::string> names = data.variables.covariates;
  names.insert(names.end(), data.variables.responses.begin(), data.variables.responses.end());
  for (std::size_t k = 0; k < data.datasets.size(); ++k) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      const Index jj = static_cast<Index>(j);
      out += names[j] + "," + data.conditions[k] + "," +
             format_double(data.datasets[k].lower(jj)) + "," +
             format_double(data.datasets[k].upper(jj)) + "\n";
    }
  }
  write_text(path, out);
}

namespace {

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

double as_double(const std::string& v, const std::string& w) { return parse_number(v, w); }

long long as_int(const std::string& v, const std::string& w) {
  long long out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (v.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::ParseError, w + ": invalid integer '" + v + "'");
  }
  return out;
}

bool as_bool(const std::string& v, const std::string& w) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorKind::ParseError, w + ": expected true or false, got '" + v + "'");
}

PenaltyKind as_kind(const std::string& v, const std::string& w) {
  if (v == "group") return PenaltyKind::Group;
  if (v == "fused") return PenaltyKind::Fused;
  throw Error(ErrorKind::ParseError, w + ": expected group or fused, got '" + v + "'");
}

std::vector<double> as_list(const std::string& v, const std::string& w) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  for (const auto& tok : split(v, ',')) out.push_back(parse_number(tok, w));
  return out;
}

#define JCG_D(key, field) {key, [](RunConfig& c, const std::string& v, const std::string& w) { c.field = as_double(v, w); }}
#define JCG_I(key, field) {key, [](RunConfig& c, const std::string& v, const std::string& w) { c.field = static_cast<decltype(c.field)>(as_int(v, w)); }}
#define JCG_B(key, field) {key, [](RunConfig& c, const std::string& v, const std::string& w) { c.field = as_bool(v, w); }}
#define JCG_L(key, field) {key, [](RunConfig& c, const std::string& v, const std::string& w) { c.field = as_list(v, w); }}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      JCG_D("lambda", fit.penalties.lambda),
      JCG_D("rho", fit.penalties.rho),
      JCG_D("nu", fit.penalties.nu),
      JCG_D("alpha1", fit.penalties.alpha1),
      JCG_D("alpha2", fit.penalties.alpha2),
      JCG_D("alpha3", fit.penalties.alpha3),
      {"theta_penalty", [](RunConfig& c, const std::string& v, const std::string& w) {
         c.fit.penalties.theta_kind = as_kind(v, w);
       }},
      {"omega_penalty", [](RunConfig& c, const std::string& v, const std::string& w) {
         c.fit.penalties.omega_kind = as_kind(v, w);
       }},
      JCG_D("em_tol", fit.em_tol),
      JCG_I("em_max_iter", fit.em_max_iter),
      JCG_D("inner_tol", fit.inner_tol),
      JCG_I("inner_max_iter", fit.inner_max_iter),
      JCG_D("admm_tau", fit.admm_tau),
      JCG_D("jgl_tol", fit.jgl_tol),
      JCG_I("jgl_max_iter", fit.jgl_max_iter),
      JCG_D("multilasso_tol", fit.multilasso_tol),
      JCG_I("multilasso_max_iter", fit.multilasso_max_iter),
      JCG_B("fix_omega", fit.fix_omega),
      JCG_B("skip_estep", fit.skip_estep),
      JCG_L("nu_grid", path.nu_grid),
      JCG_L("lambda_grid", path.lambda_grid),
      JCG_L("rho_grid", path.rho_grid),
      JCG_I("nu_points", path.nu_points),
      JCG_D("nu_min_ratio", path.nu_min_ratio),
      JCG_I("lambda_rho_points", path.lambda_rho_points),
      JCG_D("lambda_rho_min_ratio", path.lambda_rho_min_ratio),
      JCG_B("check_thresholds", path.check_thresholds),
      {"scenario_preset", [](RunConfig& c, const std::string& v, const std::string& w) {
         const std::uint64_t seed = c.scenario.seed;
         c.scenario = scenario_preset(static_cast<int>(as_int(v, w)));
         c.scenario.seed = seed;
       }},
      {"scenario_name", [](RunConfig& c, const std::string& v, const std::string&) {
         c.scenario.name = v;
       }},
      JCG_I("k", scenario.k),
      JCG_I("n", scenario.n),
      JCG_I("p", scenario.p),
      JCG_I("q", scenario.q),
      JCG_D("censored_fraction_y", scenario.censored_fraction_y),
      JCG_I("censored_count_y", scenario.censored_count_y),
      JCG_D("mar_fraction_x", scenario.mar_fraction_x),
      JCG_I("mar_count_x", scenario.mar_count_x),
      JCG_D("event_probability", scenario.event_probability),
      JCG_D("censor_value", scenario.censor_value),
      JCG_I("seed", scenario.seed),
      JCG_I("band_step", scenario.band_step),
      JCG_I("band_width", scenario.band_width),
      JCG_D("band_low", scenario.band_low),
      JCG_D("band_high", scenario.band_high),
      JCG_I("b_rows", scenario.b_rows),
      JCG_D("b_low", scenario.b_low),
      JCG_D("b_high", scenario.b_high),
      JCG_D("min_eigenvalue", scenario.min_eigenvalue),
      JCG_I("replicates", benchmark.replicates),
      JCG_L("rho_ratios", benchmark.rho_ratios),
      JCG_L("mse_ratios", benchmark.mse_ratios),
      {"benchmark_scenarios", [](RunConfig& c, const std::string& v, const std::string& w) {
         c.benchmark_presets.clear();
         for (double x : as_list(v, w)) c.benchmark_presets.push_back(static_cast<int>(x));
       }},
  };
  return table;
}

#undef JCG_D
#undef JCG_I
#undef JCG_B
#undef JCG_L

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, _] : setters()) out.push_back(k);
  return out;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  struct Entry {
    std::string key, value, where;
  };
  std::vector<Entry> entries;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string loc = source + ":" + std::to_string(lineno);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ParseError, loc + ":1: expected 'key = value'");
    }
    Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
            loc + ":" + std::to_string(eq + 2)};
    const bool known = std::any_of(setters().begin(), setters().end(),
                                   [&](const auto& s) { return s.first == e.key; });
    if (!known) throw Error(ErrorKind::InvalidConfig, loc + ":1: unknown key '" + e.key + "'");
    if (!seen.insert(e.key).second) {
      throw Error(ErrorKind::InvalidConfig, loc + ":1: key '" + e.key + "' given twice");
    }
    entries.push_back(std::move(e));
  }
  std::stable_partition(entries.begin(), entries.end(),
                        [](const Entry& e) { return e.key == "scenario_preset"; });
  RunConfig cfg;
  for (const auto& e : entries) {
    const auto it = std::find_if(setters().begin(), setters().end(),
                                 [&](const auto& s) { return s.first == e.key; });
    it->second(cfg, e.value, e.where);
  }
  return cfg;
}

RunConfig read_config(const fs::path& path) { return parse_config(read_text(path), path.string()); }

std::string fit_document(const FitResult& fit, const FitConfig& config,
                         const std::vector<std::string>& conditions,
                         const VariableRoles& variables) {
  const PenaltyConfig& pen = config.penalties;
  json doc;
  doc["conditions"] = conditions;
  doc["covariates"] = variables.covariates;
  doc["responses"] = variables.responses;
  doc["penalties"] = json{{"lambda", pen.lambda}, {"rho", pen.rho}, {"nu", pen.nu},
                          {"alpha1", pen.alpha1}, {"alpha2", pen.alpha2}, {"alpha3", pen.alpha3},
                          {"theta_penalty", to_string(pen.theta_kind)},
                          {"omega_penalty", to_string(pen.omega_kind)}};
  doc["settings"] = json{{"em_tol", config.em_tol},
                         {"em_max_iter", config.em_max_iter},
                         {"inner_tol", config.inner_tol},
                         {"inner_max_iter", config.inner_max_iter},
                         {"admm_tau", config.admm_tau},
                         {"jgl_tol", config.jgl_tol},
                         {"jgl_max_iter", config.jgl_max_iter},
                         {"multilasso_tol", config.multilasso_tol},
                         {"multilasso_max_iter", config.multilasso_max_iter},
                         {"fix_omega", config.fix_omega},
                         {"skip_estep", config.skip_estep}};
  doc["converged"] = fit.converged;
  doc["em_iterations"] = fit.em_iterations;
  doc["q"] = json{{"x", fit.q.q_x}, {"y_given_x", fit.q.q_y_given_x}, {"total", fit.q.total()}};
  doc["penalty"] = fit.penalty;
  doc["penalized_q"] = fit.penalized_q();
  doc["df"] = json{{"x", fit.df.x}, {"y_given_x", fit.df.y_given_x}};
  doc["bic"] = json{{"x", fit.bic.x}, {"y_given_x", fit.bic.y_given_x}, {"total", fit.bic.total}};
  const FitDiagnostics& d = fit.diagnostics;
  doc["diagnostics"] = json{{"jgl_calls", d.jgl_calls},
                            {"jgl_unconverged", d.jgl_unconverged},
                            {"multilasso_calls", d.multilasso_calls},
                            {"multilasso_unconverged", d.multilasso_unconverged},
                            {"inner_iterations", d.inner_iterations},
                            {"inner_unconverged", d.inner_unconverged},
                            {"rejected_steps", d.rejected_steps},
                            {"psd_shifts", d.psd_shifts}};
  doc["penalized_q_trace"] = fit.penalized_q_trace;
  json est = json::array();
  for (std::size_t k = 0; k < fit.params.size(); ++k) {
    const ModelParams& m = fit.params[k];
    est.push_back(json{{"condition", k < conditions.size() ? conditions[k] : std::to_string(k)},
                       {"mu", vector_json(m.mu)},
                       {"xi", vector_json(m.xi)},
                       {"intercept", vector_json(m.intercept())},
                       {"omega", matrix_json(m.omega)},
                       {"b", matrix_json(m.b)},
                       {"theta", matrix_json(m.theta)}});
  }
  doc["estimates"] = std::move(est);
  return doc.dump(2) + "\n";
}

void write_fit_outputs(const fs::path& dir, const FitResult& fit, const FitConfig& config,
                       const std::vector<std::string>& conditions,
                       const VariableRoles& variables) {
  fs::create_directories(dir);
  write_text(dir / "fit.json", fit_document(fit, config, conditions, variables));
  MatrixList thetas, omegas;
  for (const auto& m : fit.params) {
    thetas.push_back(m.theta);
    omegas.push_back(m.omega);
  }
  for (std::size_t k = 0; k < fit.params.size(); ++k) {
    write_edges(dir / ("theta_edges_" + conditions[k] + ".csv"), thetas, variables.responses,
                conditions, k);
    write_edges(dir / ("omega_edges_" + conditions[k] + ".csv"), omegas, variables.covariates,
                conditions, k);
  }
  std::string coef = "covariate,response,condition,coefficient\n";
  for (std::size_t k = 0; k < fit.params.size(); ++k) {
    const Matrix& b = fit.params[k].b;
    for (Index j = 0; j < b.rows(); ++j)
      for (Index h = 0; h < b.cols(); ++h)
        coef += variables.covariates[j] + "," + variables.responses[h] + "," + conditions[k] +
                "," + format_double(b(j, h)) + "\n";
  }
  write_text(dir / "coefficients.csv", coef);
}

void write_path_outputs(const fs::path& dir, const PathResult& path, const FitConfig& config,
                        const std::vector<std::string>& conditions,
                        const VariableRoles& variables) {
  fs::create_directories(dir);
  std::string nu = "nu,bic_x,bic_y_given_x,bic_total,df_x,df_y_given_x,converged\n";
  for (const auto& pt : path.nu_path) nu += format_double(pt.nu) + "," + bic_row(pt);
  write_text(dir / "bic_nu.csv", nu);
  std::string lr = "lambda,rho,bic_x,bic_y_given_x,bic_total,df_x,df_y_given_x,converged\n";
  for (const auto& pt : path.lambda_rho_path) {
    lr += format_double(pt.lambda) + "," + format_double(pt.rho) + "," + bic_row(pt);
  }
  write_text(dir / "bic_lambda_rho.csv", lr);

  const PathPoint& s1 = path.nu_path[path.selected_nu];
  const PathPoint& s2 = path.lambda_rho_path[path.selected_lambda_rho];
  json sel{{"nu", s1.nu},
           {"lambda", s2.lambda},
           {"rho", s2.rho},
           {"nu_index", path.selected_nu},
           {"lambda_rho_index", path.selected_lambda_rho},
           {"nu_max", path.nu_max},
           {"lambda_max", path.lambda_max},
           {"rho_max", path.rho_max},
           {"threshold_checked", path.threshold_checked},
           {"threshold_b_zero", path.threshold_b_zero},
           {"threshold_theta_diagonal", path.threshold_theta_diagonal}};
  write_text(dir / "selection.json", sel.dump(2) + "\n");

  FitConfig chosen = config;
  chosen.fix_omega = true;
  chosen.penalties.nu = s1.nu;
  chosen.penalties.lambda = s2.lambda;
  chosen.penalties.rho = s2.rho;
  write_fit_outputs(dir / "selected", path.selected, chosen, conditions, variables);
}

VariableRoles simulated_variables(const ScenarioConfig& scenario) {
  VariableRoles v;
  for (int j = 1; j <= scenario.q; ++j) v.covariates.push_back("x" + std::to_string(j));
  for (int j = 1; j <= scenario.p; ++j) v.responses.push_back("y" + std::to_string(j));
  return v;
}

std::vector<std::string> simulated_conditions(const ScenarioConfig& scenario) {
  std::vector<std::string> out;
  for (int k = 1; k <= scenario.k; ++k) out.push_back("condition" + std::to_string(k));
  return out;
}

InputData write_simulation(const fs::path& dir, const SimulatedData& sim,
                           const ScenarioConfig& scenario) {
  fs::create_directories(dir);
  InputData data;
  data.conditions = simulated_conditions(scenario);
  data.variables = simulated_variables(scenario);
  data.datasets = sim.datasets;
  for (std::size_t k = 0; k < sim.datasets.size(); ++k) {
    write_dataset(dir / (data.conditions[k] + ".csv"), sim.datasets[k], data.variables);
  }
  write_roles(dir / "roles.csv", data.variables);
  write_limits(dir / "limits.csv", data);

  json truth;
  truth["scenario"] = scenario_json(scenario);
  truth["censored_responses"] = json::array();
  for (Index j : sim.truth.censored_y) truth["censored_responses"].push_back(data.variables.responses[j]);
  truth["missing_covariates"] = json::array();
  for (Index j : sim.truth.missing_x) truth["missing_covariates"].push_back(data.variables.covariates[j]);
  json params = json::array();
  for (std::size_t k = 0; k < sim.truth.params.size(); ++k) {
    const ModelParams& m = sim.truth.params[k];
    params.push_back(json{{"condition", data.conditions[k]},
                          {"theta_boost", sim.truth.theta_boost[k]},
                          {"omega_boost", sim.truth.omega_boost[k]},
                          {"mu", vector_json(m.mu)},
                          {"xi", vector_json(m.xi)},
                          {"omega", matrix_json(m.omega)},
                          {"b", matrix_json(m.b)},
                          {"theta", matrix_json(m.theta)}});
  }
  truth["parameters"] = std::move(params);
  write_text(dir / "truth.json", truth.dump(2) + "\n");
  return data;
}

void write_benchmark(const fs::path& dir, const BenchmarkReport& report,
                     const BenchmarkConfig& config) {
  fs::create_directories(dir);
  std::string head = "scenario,method,replicates";
  for (double r : config.mse_ratios) head += ",mse_" + ratio_label(r) + ",mse_se_" + ratio_label(r);
  head += ",auc,auc_se\n";
  std::string table = head;
  json rows = json::array();
  for (const auto& row : report.summary) {
    table += row.scenario + "," + to_string(row.method) + "," + std::to_string(row.replicates);
    json mse = json::object();
    for (std::size_t i = 0; i < row.mse_mean.size(); ++i) {
      table += "," + format_double(row.mse_mean[i]) + "," + format_double(row.mse_se[i]);
      mse[ratio_label(config.mse_ratios[i])] = json{{"mean", row.mse_mean[i]}, {"se", row.mse_se[i]}};
    }
    table += "," + format_double(row.auc_mean) + "," + format_double(row.auc_se) + "\n";
    rows.push_back(json{{"scenario", row.scenario},
                        {"method", to_string(row.method)},
                        {"replicates", row.replicates},
                        {"mse", std::move(mse)},
                        {"auc", json{{"mean", row.auc_mean}, {"se", row.auc_se}}}});
  }
  write_text(dir / "report.csv", table);

  std::string reps = "scenario,method,replicate,rho_max";
  for (double r : config.mse_ratios) reps += ",mse_" + ratio_label(r);
  reps += ",auc\n";
  for (const auto& o : report.outcomes) {
    reps += o.scenario + "," + to_string(o.method) + "," + std::to_string(o.replicate) + "," +
            format_double(o.rho_max);
    for (double v : o.mse) reps += "," + format_double(v);
    reps += "," + format_double(o.auc) + "\n";
  }
  write_text(dir / "replicates.csv", reps);

  json summary;
  summary["replicates"] = config.replicates;
  summary["rho_ratios"] = config.rho_ratios;
  summary["mse_ratios"] = config.mse_ratios;
  summary["alpha2"] = config.fit.penalties.alpha2;
  summary["penalty"] = to_string(config.fit.penalties.theta_kind);
  summary["scenarios"] = json::array();
  for (const auto& s : config.scenarios) summary["scenarios"].push_back(scenario_json(s));
  summary["rows"] = std::move(rows);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace jcglasso
