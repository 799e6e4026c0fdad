// amod: planning, simulation and training front end.
//
// Exit codes: 0 ok, 2 invalid input, 3 solver failure, 4 I/O trouble.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "amod/exp/policy_factory.hpp"
#include "amod/exp/presets.hpp"
#include "amod/exp/runner.hpp"
#include "amod/planner/capacity.hpp"
#include "amod/planner/static_planner.hpp"
#include "amod/ppo/trainer.hpp"

namespace fs = std::filesystem;
using namespace amod;

namespace {

struct RunArgs {
  std::string scenario;
  int horizon = 1000;
  int replications = 1;
  std::uint64_t seed = 1;
  std::string seeds;
  std::string out;
  bool force = false;
  int threads = 1;
};

std::vector<std::uint64_t> resolve_seeds(const RunArgs& a) {
  std::vector<std::uint64_t> out;
  if (!a.seeds.empty()) {
    std::stringstream in(a.seeds);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      try {
        out.push_back(std::stoull(tok));
      } catch (const std::logic_error&) {
        throw ValidationError("bad seed '" + tok + "'");
      }
    }
    return out;
  }
  if (a.replications < 1) throw ValidationError("replications must be >= 1");
  for (int k = 0; k < a.replications; ++k) out.push_back(a.seed + static_cast<std::uint64_t>(k));
  return out;
}

// Output directories are unique per run unless --force.
void prepare_out_dir(const std::string& dir, bool force) {
  if (dir.empty()) throw ValidationError("--out is required");
  std::error_code ec;
  if (fs::exists(dir) && !fs::is_empty(dir) && !force)
    throw ValidationError("output directory " + dir + " is not empty (use --force)");
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}

std::shared_ptr<const model::Scenario> load(const std::string& path) {
  return std::make_shared<const model::Scenario>(model::load_scenario(path));
}

void add_run_flags(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--scenario", a.scenario, "Scenario file")->required();
  cmd->add_option("--horizon", a.horizon, "Periods per run");
  cmd->add_option("--replications", a.replications, "Runs with seeds seed, seed+1, ...");
  cmd->add_option("--seed", a.seed, "First seed");
  cmd->add_option("--seeds", a.seeds, "Explicit comma-separated seeds");
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_flag("--force", a.force, "Allow a non-empty output directory");
  cmd->add_option("--threads", a.threads, "Replications run in parallel");
}

void write_report(std::ostream& out, const planner::StaticPlan& plan, const model::Scenario& scn) {
  out << std::setprecision(10);
  out << "status " << planner::to_string(plan.status) << "\n";
  out << "objective " << plan.objective << "\n";
  out << "dual_objective " << plan.dual_objective << "\n";
  out << "fleet_dual " << plan.fleet_dual << "\n";
  out << "vehicle_time " << plan.vehicle_time(scn) << " of " << scn.fleet_size << "\n";
  if (plan.status != planner::PlanStatus::kOptimal) return;
  const auto rep = planner::marginal_prices(plan, scn);
  out << "profit_identity " << rep.profit_identity << "\n";
  out << "max_identity_error " << rep.max_identity_error << "\n";
  out << "bound_holds " << (rep.bound_holds ? "yes" : "no") << "\n";
  out << "i,j,lambda,ell,ell_star,bound,nu,Lambda\n";
  for (int i = 0; i < scn.m; ++i)
    for (int j = 0; j < scn.m; ++j)
      if (i != j)
        out << i << ',' << j << ',' << scn.lambda(i, j) << ',' << plan.ell(i, j) << ','
            << rep.ell_star(i, j) << ',' << rep.bound(i, j) << ',' << plan.nu(i, j) << ','
            << plan.Lambda(i, j) << "\n";
  const auto cap = planner::capacity_check(scn, plan.Lambda);
  out << "capacity_rho " << cap.rho_star << " stable " << (cap.stable ? "yes" : "no") << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Electric AMoD fleet laboratory: static planning, simulation and PPO training"};
  app.require_subcommand(1);

  // gen-scenario
  auto* gen = app.add_subcommand("gen-scenario", "Write a built-in or CSV-assembled scenario");
  std::string preset = "two-node", gen_out, lambda_csv, tau_csv, vtrip_csv;
  std::uint64_t gen_seed = 1;
  int fleet = 0;
  gen->add_option("--preset", preset, "two-node, two-node-electric, manhattan-like, sf-like");
  gen->add_option("--seed", gen_seed, "Seed for synthetic matrices");
  gen->add_option("--fleet", fleet, "Override the fleet size");
  gen->add_option("--lambda-csv", lambda_csv, "Arrival-rate matrix from a trip dataset");
  gen->add_option("--tau-csv", tau_csv, "Travel-time matrix (periods)");
  gen->add_option("--v-trip-csv", vtrip_csv, "Trip-energy matrix (battery units)");
  gen->add_option("--out", gen_out, "Scenario file to write")->required();

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Solve the static pricing/routing/charging program");
  std::string plan_scn, plan_out, report_out;
  bool no_budget = false;
  plan_cmd->add_option("--scenario", plan_scn, "Scenario file")->required();
  plan_cmd->add_option("--plan-out", plan_out, "Plan file to write")->required();
  plan_cmd->add_option("--report", report_out, "Price/dual report (default: <plan-out>.report)");
  plan_cmd->add_flag("--no-fleet-budget", no_budget, "Drop the vehicle-time budget constraint");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a policy and emit per-step and summary CSVs");
  RunArgs sim_args;
  std::string sim_policy = "static", plan_in, sweep;
  bool trajectory = false;
  add_run_flags(sim, sim_args);
  sim->add_option("--policy", sim_policy, "static | scaled-static:<s> | surge:<m>:<thr> | frozen | rl:<ckpt>");
  sim->add_option("--plan-in", plan_in, "Use this plan instead of solving");
  sim->add_option("--sweep", sweep, "surge or scale: emit a sweep table instead")
      ->check(CLI::IsMember({"surge", "scale"}));
  sim->add_flag("--trajectory", trajectory, "Write trajectory_<seed>.csv per replication");

  // compare
  auto* cmp = app.add_subcommand("compare", "Run several policies on shared seeds");
  RunArgs cmp_args;
  std::vector<std::string> cmp_policies;
  add_run_flags(cmp, cmp_args);
  cmp->add_option("--policy", cmp_policies, "Policy descriptor (repeat, at least two)")->required();

  // train
  auto* tr = app.add_subcommand("train", "Train a PPO agent");
  ppo::PpoConfig cfg;
  std::string tr_scn, tr_out, resume, hidden = "128,128,128,128", objective = "clip";
  std::uint64_t total_steps = 1000000;
  int ckpt_every = 10, eval_horizon = 2000, eval_reps = 3;
  bool paired = false, force_train = false, quiet = false;
  tr->add_option("--scenario", tr_scn, "Scenario file")->required();
  tr->add_option("--out", tr_out, "Checkpoint/metrics directory")->required();
  tr->add_option("--total-steps", total_steps, "Env steps for this run");
  tr->add_option("--resume", resume, "Continue from a checkpoint (fine-tuning)");
  tr->add_flag("--paired-scratch", paired,
               "With --resume: also train from scratch on the same budget and compare");
  tr->add_option("--eval-horizon", eval_horizon, "Periods per evaluation run (paired mode)");
  tr->add_option("--eval-replications", eval_reps, "Evaluation seeds (paired mode)");
  tr->add_option("--seed", cfg.seed, "Training seed");
  tr->add_option("--num-envs", cfg.num_envs, "N parallel actors");
  tr->add_option("--horizon", cfg.horizon, "T steps per actor per iteration");
  tr->add_option("--epochs", cfg.epochs, "K epochs per iteration");
  tr->add_option("--minibatch", cfg.minibatch, "M samples per minibatch");
  tr->add_option("--lr", cfg.lr, "Adam step size");
  tr->add_option("--gamma", cfg.gamma, "Discount");
  tr->add_option("--gae-lambda", cfg.lambda_gae, "GAE lambda");
  tr->add_option("--clip-eps", cfg.clip_eps, "Clip range");
  tr->add_option("--vf-coef", cfg.vf_coef, "Value loss coefficient");
  tr->add_option("--ent-coef", cfg.ent_coef, "Entropy coefficient");
  tr->add_option("--objective", objective, "clip or kl_pen");
  tr->add_option("--d-targ", cfg.d_targ, "KL target (kl_pen)");
  tr->add_option("--kl-beta", cfg.kl_beta, "Initial KL coefficient (kl_pen)");
  tr->add_option("--hidden", hidden, "Hidden layer sizes, comma-separated");
  tr->add_option("--init-log-std", cfg.init_log_std, "Initial exploration log std");
  tr->add_option("--episode-length", cfg.episode_length, "Fixed episode length (0: continuing)");
  tr->add_option("--threads", cfg.threads, "Threads for env stepping");
  tr->add_option("--checkpoint-every", ckpt_every, "Iterations between checkpoints");
  tr->add_flag("--force", force_train, "Allow a non-empty output directory");
  tr->add_flag("--quiet", quiet, "No per-iteration log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*gen) {
    model::Scenario s = exp::make_preset(preset, gen_seed);
    if (!lambda_csv.empty()) {
      s.lambda = model::read_csv_matrix(lambda_csv);
      s.m = static_cast<int>(s.lambda.rows());
    }
    if (!tau_csv.empty()) s.tau = model::read_csv_matrix(tau_csv).array().round().cast<int>();
    if (!vtrip_csv.empty())
      s.v_trip = model::read_csv_matrix(vtrip_csv).array().round().cast<int>();
    if (s.tau.rows() != s.m || s.v_trip.rows() != s.m || s.price.mean.size() != s.m) {
      if (tau_csv.empty() || (s.electric() && vtrip_csv.empty()))
        throw ValidationError("CSV matrices change m; supply --tau-csv (and --v-trip-csv)");
      if (s.v_trip.rows() != s.m) s.v_trip = Eigen::MatrixXi::Zero(s.m, s.m);
      s.price.mean = Eigen::VectorXd::Constant(s.m, s.price.mean.size() ? s.price.mean[0] : 0.0);
      s.price.stddev = Eigen::VectorXd::Constant(s.m, s.price.stddev.size() ? s.price.stddev[0] : 0.0);
    }
    if (fleet > 0) s.fleet_size = fleet;
    model::validate(s);
    model::save_scenario(s, gen_out);
    std::cout << "wrote " << gen_out << " (m = " << s.m << ", hash " << model::scenario_hash_hex(s)
              << ")\n";
    return 0;
  }

  if (*plan_cmd) {
    const auto scn = model::load_scenario(plan_scn);
    planner::PlannerOptions popt;
    popt.fleet_budget = !no_budget;
    const auto plan = planner::solve_static(scn, popt);
    planner::save_plan(plan, plan_out);
    auto report = open_out(report_out.empty() ? plan_out + ".report" : report_out);
    write_report(report, plan, scn);
    write_report(std::cout, plan, scn);
    if (plan.status != planner::PlanStatus::kOptimal)
      throw SolverError("static planner finished with status " + planner::to_string(plan.status) +
                        ": " + plan.message);
    return 0;
  }

  if (*sim) {
    auto scn = load(sim_args.scenario);
    const auto seeds = resolve_seeds(sim_args);
    prepare_out_dir(sim_args.out, sim_args.force);
    std::optional<planner::StaticPlan> plan;
    if (!plan_in.empty()) plan = planner::load_plan(plan_in);
    exp::PolicyFactory factory(scn, plan);
    const std::string hash = model::scenario_hash_hex(*scn);
    if (!sweep.empty()) {
      const auto res = sweep == "surge"
                           ? exp::surge_sweep(scn, factory, {1.25, 1.5, 2.0}, {0.5, 1.0, 2.0},
                                              sim_args.horizon, seeds, sim_args.threads)
                           : exp::scale_sweep(scn, factory, {0.9, 1.0, 1.05, 1.1, 1.25, 1.5},
                                              sim_args.horizon, seeds, sim_args.threads);
      auto f = open_out(fs::path(sim_args.out) / "sweep.csv");
      exp::write_sweep(f, res, hash, seeds);
      auto g = open_out(fs::path(sim_args.out) / "sweep_grid.csv");
      exp::write_sweep_grid(g, res);
      exp::write_sweep_grid(std::cout, res);
      return 0;
    }
    const auto pol = factory.make(sim_policy);
    std::vector<exp::MetricsReport> reports;
    if (trajectory) {
      for (auto s : seeds) {
        auto t = open_out(fs::path(sim_args.out) / ("trajectory_" + std::to_string(s) + ".csv"));
        reports.push_back(exp::simulate(scn, *pol, sim_args.horizon, s, &t));
      }
    } else {
      reports = exp::simulate_many(scn, *pol, sim_args.horizon, seeds, sim_args.threads);
    }
    auto steps = open_out(fs::path(sim_args.out) / "steps.csv");
    auto summary = open_out(fs::path(sim_args.out) / "summary.csv");
    exp::write_steps_header(steps);
    exp::write_summary_header(summary);
    for (const auto& r : reports) {
      exp::write_steps(steps, r, hash);
      exp::write_summary(summary, r, hash);
    }
    const auto s = exp::summarize(reports);
    std::cout << pol->name() << ": mean reward " << s.mean_reward << ", mean queue "
              << s.mean_queue << ", charge price " << s.charge_price << "\n";
    return 0;
  }

  if (*cmp) {
    if (cmp_policies.size() < 2) throw ValidationError("compare needs at least two --policy");
    auto scn = load(cmp_args.scenario);
    const auto seeds = resolve_seeds(cmp_args);
    prepare_out_dir(cmp_args.out, cmp_args.force);
    exp::PolicyFactory factory(scn);
    const std::string hash = model::scenario_hash_hex(*scn);
    auto steps = open_out(fs::path(cmp_args.out) / "steps.csv");
    exp::write_steps_header(steps);
    std::vector<exp::Summary> sums;
    for (const auto& desc : cmp_policies) {
      const auto pol = factory.make(desc);
      auto reports = exp::simulate_many(scn, *pol, cmp_args.horizon, seeds, cmp_args.threads);
      for (auto& r : reports) {
        r.policy = desc;
        exp::write_steps(steps, r, hash);
      }
      sums.push_back(exp::summarize(reports));
    }
    auto summary = open_out(fs::path(cmp_args.out) / "summary.csv");
    exp::write_ranking(summary, cmp_policies, sums, hash, seeds);
    exp::write_ranking(std::cout, cmp_policies, sums, hash, seeds);
    return 0;
  }

  if (*tr) {
    auto scn = load(tr_scn);
    cfg.objective = ppo::objective_from_string(objective);
    cfg.hidden.clear();
    {
      std::stringstream in(hidden);
      std::string tok;
      while (std::getline(in, tok, ','))
        if (!tok.empty()) cfg.hidden.push_back(std::stoi(tok));
    }
    cfg.validate();
    if (paired && resume.empty()) throw ValidationError("--paired-scratch needs --resume");
    prepare_out_dir(tr_out, force_train);
    ppo::TrainOptions opts;
    opts.total_steps = total_steps;
    opts.checkpoint_every = ckpt_every;
    opts.log = quiet ? nullptr : &std::cout;
    if (!resume.empty()) opts.resume = resume;
    opts.out_dir = paired ? fs::path(tr_out) / "finetune" : fs::path(tr_out);
    const auto res = ppo::train(scn, cfg, opts);
    std::cout << "final checkpoint " << res.final_checkpoint.string() << "\n";
    if (paired) {
      ppo::TrainOptions scratch = opts;
      scratch.resume.reset();
      scratch.out_dir = fs::path(tr_out) / "scratch";
      const auto res2 = ppo::train(scn, cfg, scratch);
      RunArgs ev;
      ev.seed = 1000003;
      ev.replications = eval_reps;
      const auto seeds = resolve_seeds(ev);
      exp::PolicyFactory factory(scn);
      std::vector<std::string> names{"finetuned", "scratch", "static"};
      std::vector<exp::Summary> sums;
      for (const auto& ck : {res.final_checkpoint, res2.final_checkpoint})
        sums.push_back(exp::summarize(exp::simulate_many(
            scn, *factory.make("rl:" + ck.string()), eval_horizon, seeds, cfg.threads)));
      sums.push_back(exp::summarize(
          exp::simulate_many(scn, *factory.make("static"), eval_horizon, seeds, cfg.threads)));
      auto f = open_out(fs::path(tr_out) / "finetune_comparison.csv");
      exp::write_ranking(f, names, sums, model::scenario_hash_hex(*scn), seeds);
      exp::write_ranking(std::cout, names, sums, model::scenario_hash_hex(*scn), seeds);
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
