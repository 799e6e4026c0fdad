#include "amod/model/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace amod::model {
namespace {

constexpr int kFormatVersion = 1;

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

double parse_double(const std::string& token, int line_no) {
  std::string t = trim(token);
  // std::from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": expected a number, got '" + t + "'");
  }
  return value;
}

int parse_int(const std::string& token, int line_no) {
  double v = parse_double(token, line_no);
  if (v != std::floor(v) || std::abs(v) > 2e9) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": expected an integer, got '" + trim(token) + "'");
  }
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<double> parse_list(const std::string& value, int line_no) {
  std::vector<double> out;
  for (const auto& tok : split(value, ',')) out.push_back(parse_double(tok, line_no));
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Derived>
void write_matrix(std::ostream& out, const std::string& name,
                  const Eigen::MatrixBase<Derived>& mat) {
  out << "matrix " << name << "\n";
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      if (j) out << ", ";
      out << fmt_double(static_cast<double>(mat(i, j)));
    }
    out << "\n";
  }
  out << "end\n";
}

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt_double(v[i]);
  }
  return s;
}

}  // namespace

std::string to_string(PriceMode mode) {
  switch (mode) {
    case PriceMode::kConstant: return "constant";
    case PriceMode::kIidLognormal: return "iid_lognormal";
    case PriceMode::kMeanReverting: return "mean_reverting";
  }
  return "constant";
}

PriceMode price_mode_from_string(const std::string& name) {
  if (name == "constant") return PriceMode::kConstant;
  if (name == "iid_lognormal") return PriceMode::kIidLognormal;
  if (name == "mean_reverting") return PriceMode::kMeanReverting;
  throw ParseError("unknown price mode '" + name + "'");
}

bool PriceProcess::operator==(const PriceProcess& o) const {
  return mode == o.mode && mean.size() == o.mean.size() && mean == o.mean &&
         stddev.size() == o.stddev.size() && stddev == o.stddev &&
         kappa == o.kappa && p_min == o.p_min && p_max == o.p_max;
}

double WillingnessToPay::cdf(double price) const {
  if (price <= 0.0) return 0.0;
  if (price >= ell_max) return 1.0;
  return price / ell_max;
}

bool Scenario::operator==(const Scenario& o) const {
  auto same_shape = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols();
  };
  return m == o.m && same_shape(lambda, o.lambda) && lambda == o.lambda &&
         same_shape(tau, o.tau) && tau == o.tau &&
         same_shape(v_trip, o.v_trip) && v_trip == o.v_trip &&
         v_max == o.v_max && ell_max == o.ell_max && beta == o.beta &&
         w == o.w && fleet_size == o.fleet_size && price == o.price &&
         period_minutes == o.period_minutes;
}

void validate(const Scenario& scn) {
  auto fail = [](const std::string& msg) { throw ValidationError(msg); };
  const int m = scn.m;
  if (m < 2) fail("node count: m must be at least 2");
  if (scn.lambda.rows() != m || scn.lambda.cols() != m)
    fail("lambda shape: expected " + std::to_string(m) + "x" + std::to_string(m));
  if (scn.tau.rows() != m || scn.tau.cols() != m)
    fail("tau shape: expected " + std::to_string(m) + "x" + std::to_string(m));
  if (scn.v_trip.rows() != m || scn.v_trip.cols() != m)
    fail("v_trip shape: expected " + std::to_string(m) + "x" + std::to_string(m));
  if (scn.v_max < 0) fail("battery capacity: v_max must be >= 0");
  for (int i = 0; i < m; ++i) {
    if (scn.lambda(i, i) != 0.0)
      fail("diagonal arrival rate: lambda[" + std::to_string(i) + "][" +
           std::to_string(i) + "] must be 0");
    for (int j = 0; j < m; ++j) {
      const std::string at = "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      if (!(scn.lambda(i, j) >= 0.0) || !std::isfinite(scn.lambda(i, j)))
        fail("negative arrival rate: lambda" + at);
      if (i != j && scn.tau(i, j) < 1) fail("travel time: tau" + at + " must be >= 1");
      if (scn.v_trip(i, j) < 0) fail("negative trip energy: v_trip" + at);
      if (scn.v_trip(i, j) > scn.v_max)
        fail("infeasible trip energy: v_trip" + at + " exceeds v_max");
    }
  }
  if (!(scn.ell_max > 0.0)) fail("willingness to pay: ell_max must be > 0");
  if (!(scn.beta >= 0.0)) fail("operating cost: beta must be >= 0");
  if (!(scn.w >= 0.0)) fail("queue cost: w must be >= 0");
  if (scn.fleet_size < 1) fail("fleet size: must be >= 1");
  const auto& pp = scn.price;
  if (pp.mean.size() != m || pp.stddev.size() != m)
    fail("price process: mean/std need one entry per node");
  if (!(pp.p_min <= pp.p_max)) fail("price process: p_min > p_max");
  if (pp.kappa < 0.0 || pp.kappa > 1.0) fail("price process: kappa outside [0, 1]");
  for (int i = 0; i < m; ++i) {
    if (pp.stddev[i] < 0.0) fail("price process: negative std");
    if (pp.mode == PriceMode::kIidLognormal && !(pp.mean[i] > 0.0))
      fail("price process: lognormal mode needs positive means");
  }
}

Scenario parse_scenario(const std::string& text) {
  std::map<std::string, std::pair<std::string, int>> kv;
  std::map<std::string, std::vector<std::vector<double>>> matrices;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.rfind("matrix ", 0) == 0) {
      std::string name = trim(line.substr(7));
      auto& rows = matrices[name];
      rows.clear();
      bool closed = false;
      while (std::getline(in, raw)) {
        ++line_no;
        std::string row = trim(strip_comment(raw));
        if (row.empty()) continue;
        if (row == "end") {
          closed = true;
          break;
        }
        rows.push_back(parse_list(row, line_no));
      }
      if (!closed) throw ParseError("matrix " + name + ": missing 'end'");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    kv[trim(line.substr(0, eq))] = {trim(line.substr(eq + 1)), line_no};
  }

  auto take = [&](const std::string& key) -> std::pair<std::string, int> {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("missing key '" + key + "'");
    auto out = it->second;
    kv.erase(it);
    return out;
  };
  auto take_or = [&](const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return std::pair<std::string, int>{fallback, 0};
    auto out = it->second;
    kv.erase(it);
    return out;
  };

  auto [ver, ver_line] = take("version");
  if (parse_int(ver, ver_line) != kFormatVersion)
    throw ParseError("unsupported scenario version " + ver);

  Scenario scn;
  {
    auto [v, l] = take("m");
    scn.m = parse_int(v, l);
  }
  if (scn.m < 1 || scn.m > 1000) throw ParseError("m out of range");
  const int m = scn.m;
  {
    auto [v, l] = take("ell_max");
    scn.ell_max = parse_double(v, l);
  }
  {
    auto [v, l] = take("beta");
    scn.beta = parse_double(v, l);
  }
  {
    auto [v, l] = take("w");
    scn.w = parse_double(v, l);
  }
  {
    auto [v, l] = take("fleet_size");
    scn.fleet_size = parse_int(v, l);
  }
  {
    auto [v, l] = take_or("v_max", "0");
    scn.v_max = parse_int(v, l);
  }
  {
    auto [v, l] = take_or("period_minutes", "5");
    scn.period_minutes = parse_double(v, l);
  }
  {
    auto [v, l] = take_or("price.mode", "constant");
    scn.price.mode = price_mode_from_string(v);
  }
  auto node_vector = [&](const std::string& key, double fallback) {
    auto [v, l] = take_or(key, "");
    Eigen::VectorXd out = Eigen::VectorXd::Constant(m, fallback);
    if (v.empty()) return out;
    auto vals = parse_list(v, l);
    if (vals.size() == 1) return Eigen::VectorXd::Constant(m, vals[0]).eval();
    if (static_cast<int>(vals.size()) != m)
      throw ParseError(key + ": expected 1 or " + std::to_string(m) + " values");
    for (int i = 0; i < m; ++i) out[i] = vals[i];
    return out;
  };
  scn.price.mean = node_vector("price.mean", 0.0);
  scn.price.stddev = node_vector("price.std", 0.0);
  {
    auto [v, l] = take_or("price.kappa", "0.5");
    scn.price.kappa = parse_double(v, l);
  }
  {
    auto [v, l] = take_or("price.min", "0");
    scn.price.p_min = parse_double(v, l);
  }
  {
    auto [v, l] = take_or("price.max", "1000000000");
    scn.price.p_max = parse_double(v, l);
  }
  if (!kv.empty()) throw ParseError("unknown key '" + kv.begin()->first + "'");

  auto matrix = [&](const std::string& name, bool required) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    auto it = matrices.find(name);
    if (it == matrices.end()) {
      if (required) throw ParseError("missing matrix '" + name + "'");
      return out;
    }
    const auto& rows = it->second;
    if (static_cast<int>(rows.size()) != m)
      throw ParseError("matrix " + name + ": expected " + std::to_string(m) + " rows");
    for (int i = 0; i < m; ++i) {
      if (static_cast<int>(rows[i].size()) != m)
        throw ParseError("matrix " + name + ": row " + std::to_string(i) + " has " +
                         std::to_string(rows[i].size()) + " entries");
      for (int j = 0; j < m; ++j) out(i, j) = rows[i][j];
    }
    matrices.erase(it);
    return out;
  };
  auto int_matrix = [&](const std::string& name, bool required) {
    Eigen::MatrixXd d = matrix(name, required);
    if ((d.array() != d.array().floor()).any())
      throw ParseError("matrix " + name + ": entries must be integers");
    return d.cast<int>().eval();
  };
  scn.lambda = matrix("lambda", true);
  scn.tau = int_matrix("tau", true);
  scn.v_trip = int_matrix("v_trip", false);
  if (!matrices.empty()) throw ParseError("unknown matrix '" + matrices.begin()->first + "'");

  validate(scn);
  return scn;
}

std::string format_scenario(const Scenario& scn) {
  std::ostringstream out;
  out << "# AMoD scenario\n";
  out << "version = " << kFormatVersion << "\n";
  out << "m = " << scn.m << "\n";
  out << "v_max = " << scn.v_max << "\n";
  out << "ell_max = " << fmt_double(scn.ell_max) << "\n";
  out << "beta = " << fmt_double(scn.beta) << "\n";
  out << "w = " << fmt_double(scn.w) << "\n";
  out << "fleet_size = " << scn.fleet_size << "\n";
  out << "period_minutes = " << fmt_double(scn.period_minutes) << "\n";
  out << "price.mode = " << to_string(scn.price.mode) << "\n";
  out << "price.mean = " << join(scn.price.mean) << "\n";
  out << "price.std = " << join(scn.price.stddev) << "\n";
  out << "price.kappa = " << fmt_double(scn.price.kappa) << "\n";
  out << "price.min = " << fmt_double(scn.price.p_min) << "\n";
  out << "price.max = " << fmt_double(scn.price.p_max) << "\n";
  write_matrix(out, "lambda", scn.lambda);
  write_matrix(out, "tau", scn.tau);
  write_matrix(out, "v_trip", scn.v_trip);
  return out.str();
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void save_scenario(const Scenario& scn, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario file " + path.string());
  out << format_scenario(scn);
  if (!out) throw IoError("write failed for " + path.string());
}

std::uint64_t scenario_hash(const Scenario& scn) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : format_scenario(scn)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string scenario_hash_hex(const Scenario& scn) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(scenario_hash(scn)));
  return buf;
}

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto first = trim(split(line, ',').front());
    bool numeric = !first.empty() &&
                   (std::isdigit(static_cast<unsigned char>(first[0])) ||
                    first[0] == '-' || first[0] == '.' || first[0] == '+');
    if (rows.empty() && !numeric) continue;  // header row
    rows.push_back(parse_list(line, line_no));
  }
  const auto n = rows.size();
  if (n == 0) throw ParseError(path.string() + ": empty matrix");
  Eigen::MatrixXd out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw ParseError(path.string() + ": matrix is not square");
    for (std::size_t j = 0; j < n; ++j) out(i, j) = rows[i][j];
  }
  return out;
}

double induced_rate(const Scenario& scn, int i, int j, double price) {
  double p = std::clamp(price, 0.0, scn.ell_max);
  return scn.lambda(i, j) * (1.0 - scn.willingness().cdf(p));
}

}  // namespace amod::model
