#include <cstdio>
#include <fstream>
#include <sstream>

#include "amod/planner/static_planner.hpp"

namespace amod::planner {
namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& mat) {
  out << "matrix " << name << "\n";
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) out << (j ? ", " : "") << num(mat(i, j));
    out << "\n";
  }
  out << "end\n";
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad number '" + s + "'");
  }
}

}  // namespace

std::string format_plan(const StaticPlan& plan) {
  std::ostringstream out;
  out << "# AMoD static plan\n";
  out << "version = 1\n";
  out << "m = " << plan.m() << "\n";
  out << "v_max = " << plan.v_max() << "\n";
  out << "status = " << to_string(plan.status) << "\n";
  out << "objective = " << num(plan.objective) << "\n";
  out << "dual_objective = " << num(plan.dual_objective) << "\n";
  out << "fleet_budget = " << (plan.fleet_budget ? 1 : 0) << "\n";
  out << "fleet_dual = " << num(plan.fleet_dual) << "\n";
  write_matrix(out, "ell", plan.ell);
  write_matrix(out, "nu", plan.nu);
  write_matrix(out, "Lambda", plan.Lambda);
  out << "# route i j v flow\n";
  for (int i = 0; i < plan.m(); ++i)
    for (int j = 0; j < plan.m(); ++j)
      for (int v = 0; v <= plan.v_max(); ++v)
        if (i != j && plan.route(i, j, v) != 0.0)
          out << "route " << i << " " << j << " " << v << " " << num(plan.route(i, j, v)) << "\n";
  out << "# charge i v flow\n";
  for (int i = 0; i < plan.m(); ++i)
    for (int v = 0; v <= plan.v_max(); ++v)
      if (plan.charge(i, v) != 0.0)
        out << "charge " << i << " " << v << " " << num(plan.charge(i, v)) << "\n";
  out << "# mu i v dual\n";
  for (int i = 0; i < plan.m(); ++i)
    for (int v = 0; v <= plan.v_max(); ++v)
      out << "mu " << i << " " << v << " " << num(plan.mu(i, v)) << "\n";
  return out.str();
}

StaticPlan parse_plan(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int m = -1, v_max = -1;
  StaticPlan plan;
  auto ensure = [&]() {
    if (plan.m() == 0) {
      if (m < 1 || v_max < 0) throw ParseError("plan: m and v_max must come first");
      plan = StaticPlan(m, v_max);
    }
  };
  auto check_index = [&](int i, int j, int v) {
    if (i < 0 || i >= m || j < 0 || j >= m || v < 0 || v > v_max)
      throw ParseError("plan: index out of range in '" + line + "'");
  };
  // Fields seen before the plan object exists.
  std::string status = "max_iter";
  double objective = 0, dual_objective = 0, fleet_dual = 0;
  bool fleet_budget = false;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "matrix") {
      ensure();
      std::string name;
      ls >> name;
      Eigen::MatrixXd* target = name == "ell"      ? &plan.ell
                                : name == "nu"     ? &plan.nu
                                : name == "Lambda" ? &plan.Lambda
                                                   : nullptr;
      if (!target) throw ParseError("plan: unknown matrix '" + name + "'");
      for (int i = 0; i < m; ++i) {
        if (!std::getline(in, line)) throw ParseError("plan: truncated matrix " + name);
        std::istringstream row(line);
        std::string cell;
        for (int j = 0; j < m; ++j) {
          if (!std::getline(row, cell, ',')) throw ParseError("plan: short row in " + name);
          auto b = cell.find_first_not_of(" \t"), e = cell.find_last_not_of(" \t\r");
          (*target)(i, j) = to_double(cell.substr(b, e - b + 1));
        }
      }
      if (!std::getline(in, line) || line.find("end") == std::string::npos)
        throw ParseError("plan: matrix " + name + " missing 'end'");
      continue;
    }
    if (head == "route" || head == "charge" || head == "mu") {
      ensure();
      int i = 0, j = 0, v = 0;
      std::string value;
      if (head == "route") {
        if (!(ls >> i >> j >> v >> value)) throw ParseError("plan: bad line '" + line + "'");
        check_index(i, j, v);
        plan.route(i, j, v) = to_double(value);
      } else {
        if (!(ls >> i >> v >> value)) throw ParseError("plan: bad line '" + line + "'");
        check_index(i, 0, v);
        (head == "charge" ? plan.charge(i, v) : plan.mu(i, v)) = to_double(value);
      }
      continue;
    }
    std::string eq, value;
    if (!(ls >> eq >> value) || eq != "=") throw ParseError("plan: bad line '" + line + "'");
    if (head == "version") {
      if (value != "1") throw ParseError("plan: unsupported version " + value);
    } else if (head == "m") {
      m = static_cast<int>(to_double(value));
    } else if (head == "v_max") {
      v_max = static_cast<int>(to_double(value));
    } else if (head == "status") {
      status = value;
    } else if (head == "objective") {
      objective = to_double(value);
    } else if (head == "dual_objective") {
      dual_objective = to_double(value);
    } else if (head == "fleet_budget") {
      fleet_budget = value == "1";
    } else if (head == "fleet_dual") {
      fleet_dual = to_double(value);
    } else {
      throw ParseError("plan: unknown key '" + head + "'");
    }
  }
  ensure();
  plan.status = plan_status_from_string(status);
  plan.objective = objective;
  plan.dual_objective = dual_objective;
  plan.fleet_budget = fleet_budget;
  plan.fleet_dual = fleet_dual;
  return plan;
}

void save_plan(const StaticPlan& plan, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write plan file " + path.string());
  out << format_plan(plan);
}

StaticPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open plan file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_plan(buf.str());
}

}  // namespace amod::planner
