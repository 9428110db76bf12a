#include "rcm/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "rcm/estimators.hpp"
#include "rcm/renormalization.hpp"

namespace rcm {

namespace fs = std::filesystem;

namespace {

struct RunContext {
  const ExperimentConfig& cfg;
  fs::path out;
  RunReport report;
  std::vector<EstimateRecord> records;
  std::vector<std::string> plot_sections;

  int workers() const { return cfg.workers > 0 ? cfg.workers : default_workers(); }

  std::ofstream open(const std::string& name) {
    fs::path p = out / name;
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot open output file " + p.string());
    report.outputs.push_back(name);
    return os;
  }
};

Norm parse_norm(const std::string& s) {
  if (s == "inf" || s == "linf" || s == "max") return Norm::linf();
  return Norm{std::stod(s)};
}

ConnectionFunction cfg_phi(const ExperimentConfig& cfg) {
  return ConnectionFunction::parse(cfg.str("phi"));
}

void csv_real(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

void run_sample(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  Region box = Region::cube(int(cfg.integer("dim")), cfg.real("halfwidth"));
  PointSet pts = sample_homogeneous(cfg.real("lambda"), box,
                                    RngStream::from(cfg.seed, kTagPoints), 1);
  auto os = ctx.open("points.csv");
  write_points_csv(pts, os);
  EstimateRecord r;
  r.name = "sample_count";
  r.value = double(pts.size());
  r.replications = 1;
  r.master_seed = cfg.seed;
  r.params = {{"lambda", cfg.real("lambda")}, {"halfwidth", cfg.real("halfwidth")}};
  ctx.records.push_back(r);
}

void run_graph(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  Region box = Region::cube(int(cfg.integer("dim")), cfg.real("halfwidth"));
  PointSet pts = sample_homogeneous(cfg.real("lambda"), box,
                                    RngStream::from(cfg.seed, kTagPoints), 1);
  Graph g = build_graph(pts, cfg_phi(cfg), parse_norm(cfg.str_or("norm", "2")),
                        derive(cfg.seed, kTagCoins));
  {
    auto os = ctx.open("points.csv");
    write_points_csv(pts, os);
  }
  {
    auto os = ctx.open("edges.csv");
    g.write_edges_csv(os);
  }
  ClusterDecomposition comps = components(g);
  EstimateRecord r;
  r.name = "graph_summary";
  r.value = double(g.edges.size());
  r.replications = 1;
  r.master_seed = cfg.seed;
  r.params = {{"vertices", double(pts.size())}, {"l1", double(comps.l_j(1))},
              {"l2", double(comps.l_j(2))}};
  ctx.records.push_back(r);
}

void run_theta(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  auto recs = estimate_theta(cfg.real("lambda"), cfg_phi(cfg),
                             parse_norm(cfg.str_or("norm", "2")),
                             int(cfg.integer("dim")), cfg.real("r_inner"),
                             cfg.real("r_outer"), std::size_t(cfg.integer("reps")),
                             cfg.seed, ctx.workers(), cfg.flag_or("two_level", false));
  ctx.records.insert(ctx.records.end(), recs.begin(), recs.end());
}

void run_pi_k(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  Region box = Region::cube(int(cfg.integer("dim")), cfg.real("halfwidth"));
  auto recs = estimate_pi_k(cfg.real("lambda"), cfg_phi(cfg),
                            parse_norm(cfg.str_or("norm", "2")), box,
                            cfg.integer("k_max"), std::size_t(cfg.integer("reps")),
                            cfg.seed, ctx.workers());
  ctx.records.insert(ctx.records.end(), recs.begin(), recs.end());
}

void write_curve(RunContext& ctx, const std::string& name,
                 const std::vector<std::array<double, 4>>& curve) {
  auto os = ctx.open(name);
  os << "lambda,p_hat,wilson_lo,wilson_hi\n";
  for (const auto& row : curve) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      csv_real(os, row[i]);
    }
    os << "\n";
  }
}

ThresholdOptions cfg_threshold_options(const ExperimentConfig& cfg, int workers) {
  ThresholdOptions opt;
  opt.lambda_lo = cfg.real("lambda_lo");
  opt.lambda_hi = cfg.real("lambda_hi");
  opt.tolerance = cfg.real("tolerance");
  opt.reps_per_probe = std::size_t(cfg.integer("reps"));
  opt.workers = workers;
  return opt;
}

void run_lambda_c(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const int dim = int(cfg.integer("dim"));
  CrossingGeometry geom;
  geom.dim = dim;
  geom.window = cfg.real("window");
  std::string geometry = cfg.str_or("geometry", "box");
  if (geometry == "slab") {
    if (dim < 3) throw ConfigError("slab geometry requires dim >= 3");
    geom.thickness = cfg.real("slab_thickness");
    geom.sample_thickness = std::max(geom.thickness, geom.window);
  } else {
    geom.thickness = geom.window;
    geom.sample_thickness = geom.window;
  }
  auto res = estimate_lambda_c(cfg_phi(cfg), parse_norm(cfg.str_or("norm", "2")), geom,
                               cfg_threshold_options(cfg, ctx.workers()), cfg.seed);
  ctx.records.push_back(res.record);
  write_curve(ctx, "crossing_curve.csv", res.curve);
}

void run_slab_curve(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  auto res = slab_curve(cfg_phi(cfg), parse_norm(cfg.str_or("norm", "2")),
                        int(cfg.integer("dim")), cfg.list("m_list"), cfg.real("window"),
                        cfg_threshold_options(cfg, ctx.workers()), cfg.seed);
  auto os = ctx.open("slab_curve.csv");
  os << "M,lambda_c_hat,bracket_lo,bracket_hi,reps\n";
  for (const auto& t : res.per_thickness) {
    csv_real(os, t.record.params.at("slab_thickness"));
    os << ',';
    csv_real(os, t.record.value);
    os << ',';
    csv_real(os, t.record.params.at("bracket_lo"));
    os << ',';
    csv_real(os, t.record.params.at("bracket_hi"));
    os << ',' << t.record.replications << "\n";
    ctx.records.push_back(t.record);
  }
  EstimateRecord box = res.full_box.record;
  box.name = "lambda_c_full_box";
  ctx.records.push_back(box);
  ctx.plot_sections.push_back("slab_curve.csv");
}

void run_decay(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  auto res = decay_probe(cfg.real("lambda"), cfg_phi(cfg),
                         parse_norm(cfg.str_or("norm", "2")), int(cfg.integer("dim")),
                         cfg.list("r_list"), cfg.real("r_outer"),
                         std::size_t(cfg.integer("reps")), cfg.seed, ctx.workers());
  auto os = ctx.open("decay.csv");
  os << "r,q_hat,std_error\n";
  for (const auto& r : res.per_r) {
    csv_real(os, r.params.at("r"));
    os << ',';
    csv_real(os, r.value);
    os << ',';
    csv_real(os, r.std_error);
    os << "\n";
    ctx.records.push_back(r);
  }
  ctx.records.push_back(res.slope);
  ctx.plot_sections.push_back("decay.csv");
}

void run_giant(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const int dim = int(cfg.integer("dim"));
  auto res = giant_stats(cfg.real("lambda"), cfg_phi(cfg),
                         parse_norm(cfg.str_or("norm", "2")), dim, cfg.list("s_list"),
                         std::size_t(cfg.integer("reps")), cfg.seed, ctx.workers());
  auto os = ctx.open("giant.csv");
  os << "s,l1_ratio,l1_se,l2_ratio,l2_se\n";
  for (std::size_t i = 0; i < res.l1_ratio.size(); ++i) {
    csv_real(os, res.l1_ratio[i].params.at("s"));
    os << ',';
    csv_real(os, res.l1_ratio[i].value);
    os << ',';
    csv_real(os, res.l1_ratio[i].std_error);
    os << ',';
    csv_real(os, res.l2_ratio[i].value);
    os << ',';
    csv_real(os, res.l2_ratio[i].std_error);
    os << "\n";
    ctx.records.push_back(res.l1_ratio[i]);
    ctx.records.push_back(res.l2_ratio[i]);
  }
  long theta_reps = cfg.integer_or("theta_reps", 0);
  if (theta_reps > 0 && dim == 2) {
    double s_max = cfg.list("s_list").back();
    auto recs = estimate_theta(cfg.real("lambda"), cfg_phi(cfg),
                               parse_norm(cfg.str_or("norm", "2")), dim, 1.0, s_max,
                               std::size_t(theta_reps), cfg.seed, ctx.workers());
    ctx.records.insert(ctx.records.end(), recs.begin(), recs.end());
  }
  ctx.plot_sections.push_back("giant.csv");
}

void run_fkg(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const int dim = int(cfg.integer("dim"));
  const double h = cfg.real("halfwidth");
  const double range = cfg_phi(cfg).range();
  Region window = Region::cube(dim, h);
  auto band = [&](int axis, bool low) {
    std::vector<double> lo(dim, -h), hi(dim, h);
    if (low)
      hi[axis] = -h + range;
    else
      lo[axis] = h - range;
    return Region::box(lo, hi);
  };
  std::string pair = cfg.str("pair");
  IncreasingEvent a = IncreasingEvent::l1_at_least(1, "l1>=1");
  IncreasingEvent b = a;
  if (pair == "crossings") {
    a = IncreasingEvent::connect(band(0, true), band(0, false), "cross_x");
    b = IncreasingEvent::connect(band(1, true), band(1, false), "cross_y");
  } else if (pair == "arm-count") {
    a = IncreasingEvent::connect(Region::cube(dim, 1.0),
                                 Region::difference(window, Region::cube(dim, h - range)),
                                 "arm");
    long thr = std::lround(cfg.real("lambda") * std::pow(2.0 * h, dim));
    b = IncreasingEvent::count_at_least(window, thr, "count");
  } else if (pair == "l1-crossing") {
    long thr = std::lround(0.25 * cfg.real("lambda") * std::pow(2.0 * h, dim));
    a = IncreasingEvent::l1_at_least(thr, "l1");
    b = IncreasingEvent::connect(band(0, true), band(0, false), "cross_x");
  } else if (pair == "disjoint-counts") {
    std::vector<double> lo1(dim, -h), hi1(dim, h), lo2(dim, -h), hi2(dim, h);
    hi1[0] = -h / 2;
    lo2[0] = h / 2;
    double vol = std::pow(2.0 * h, dim) / 4.0;
    a = IncreasingEvent::count_at_least(Region::box(lo1, hi1),
                                        std::lround(cfg.real("lambda") * vol), "count_left");
    b = IncreasingEvent::count_at_least(Region::box(lo2, hi2),
                                        std::lround(cfg.real("lambda") * vol), "count_right");
  } else {
    throw ConfigError("unknown fkg pair '" + pair + "'");
  }
  EstimateRecord r =
      fkg_check(cfg.real("lambda"), cfg_phi(cfg), parse_norm(cfg.str_or("norm", "2")),
                window, a, b, std::size_t(cfg.integer("reps")), cfg.seed, ctx.workers());
  r.params["pair"] = pair == "crossings"      ? 0.0
                     : pair == "arm-count"    ? 1.0
                     : pair == "l1-crossing"  ? 2.0
                                              : 3.0;
  ctx.records.push_back(r);
}

void run_explore(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const int dim = int(cfg.integer("dim"));
  Region box = Region::cube(dim, cfg.real("halfwidth"));
  PointSet xi0(dim);
  std::vector<double> o(dim, 0.0);
  xi0.append(kOriginId, o);
  ConnectionFunction phi = cfg_phi(cfg);
  Norm norm = parse_norm(cfg.str_or("norm", "2"));
  std::string construction = cfg.str("construction");
  GrowthResult res;
  if (construction == "sequential") {
    res = grow_sequential(xi0, cfg.real("lambda"), box, phi, norm,
                          RngStream::from(cfg.seed, kTagPoints));
  } else if (construction == "cubewise") {
    res = grow_cubewise(xi0, cfg.real("lambda"), box, phi, norm, cfg.seed);
  } else {
    throw ConfigError("unknown construction '" + construction + "'");
  }
  {
    auto os = ctx.open("cluster.csv");
    write_points_csv(res.cluster, os);
  }
  if (construction == "cubewise") {
    auto os = ctx.open("revealed.json");
    nlohmann::json arr = nlohmann::json::array();
    std::vector<GridVec> sites(res.state.revealed.begin(), res.state.revealed.end());
    std::sort(sites.begin(), sites.end());
    for (const auto& g : sites) {
      std::vector<double> c = cube_center(g);
      arr.push_back(c);
    }
    os << arr.dump() << "\n";
    auto os2 = ctx.open("other_points.csv");
    write_points_csv(res.other_points, os2);
  }
  EstimateRecord r;
  r.name = "cluster_order";
  r.value = double(res.cluster.size());
  r.replications = 1;
  r.master_seed = cfg.seed;
  r.params = {{"lambda", cfg.real("lambda")}, {"revealed", double(res.state.revealed.size())}};
  ctx.records.push_back(r);
}

void run_renorm(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  ToyConstants tc;
  tc.dim = int(cfg.integer("dim"));
  tc.m = cfg.integer("m");
  tc.n = cfg.integer("n");
  tc.lambda = cfg.real("lambda");
  tc.eps0 = cfg.real_or("eps0", 1.0 / 9999.0);
  tc.eps1 = cfg.real("eps1");
  long window = cfg.integer("window");
  long runs = cfg.integer_or("runs", 1);
  auto os = ctx.open("runs.csv");
  os << "run,origin_open,open_accessible,assertion_failures,cluster_order\n";
  for (long run = 0; run < runs; ++run) {
    RenormResult res = run_renormalization(tc, window, derive(cfg.seed, std::uint64_t(run)));
    if (run == 0) {
      auto log = ctx.open("stages.jsonl");
      write_stage_log_jsonl(res.stages, log);
    }
    std::size_t open_accessible = 0;
    for (const auto& st : res.stages)
      if (st.status == StageRecord::Status::Open) ++open_accessible;
    os << run << ',' << (res.origin_stage_open ? 1 : 0) << ',' << open_accessible << ','
       << res.assertion_failures << ',' << res.final_cluster.size() << "\n";
    if (run == 0) {
      EstimateRecord r;
      r.name = "renorm_run0";
      r.value = res.origin_stage_open ? 1.0 : 0.0;
      r.replications = 1;
      r.master_seed = cfg.seed;
      r.params = {{"open_accessible", double(open_accessible)},
                  {"assertion_failures", double(res.assertion_failures)},
                  {"cluster_order", double(res.final_cluster.size())}};
      ctx.records.push_back(r);
    }
  }
}

void run_oriented(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const double p = cfg.real("p");
  const long window = cfg.integer("window");
  const std::size_t reps = std::size_t(cfg.integer("reps"));
  std::vector<std::uint8_t> hits(reps, 0);
  std::uint64_t base = derive(cfg.seed, kTagExperiment);
  parallel_for(reps, ctx.workers(), [&](std::size_t rep) {
    hits[rep] =
        oriented_site_percolation(p, window, RngStream(derive(base, rep))).survives ? 1 : 0;
  });
  BinomialEstimate b;
  b.trials = reps;
  for (auto h : hits) b.successes += h;
  EstimateRecord r;
  r.name = "oriented_survival";
  r.value = b.p_hat();
  r.std_error = b.std_error();
  r.replications = reps;
  r.master_seed = cfg.seed;
  r.params = {{"p", p}, {"window", double(window)}};
  ctx.records.push_back(r);
}

void run_constants(RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  ConstantsBundle c = constants(cfg.real("lambda"), cfg.real("mu"),
                                int(cfg.integer("dim")), cfg.integer("m"),
                                cfg.integer("n"), cfg_phi(cfg),
                                std::size_t(cfg.integer("eps2_reps")), cfg.seed,
                                ctx.workers());
  nlohmann::json j;
  j["dim"] = c.dim;
  j["m"] = c.m;
  j["n"] = c.n;
  j["N"] = c.big_n;
  j["lambda"] = c.lambda;
  j["mu"] = c.mu;
  j["eps0"] = c.eps0;
  j["eps1"] = c.eps1;
  j["eps2"] = c.eps2;
  j["eps2_se"] = c.eps2_se;
  j["eps3"] = c.eps3;
  j["delta1"] = c.delta1;
  j["delta2"] = c.delta2;
  j["log_delta1"] = c.log_delta1;
  j["log_delta2"] = c.log_delta2;
  j["log_eps3"] = c.log_eps3;
  j["log_t1"] = c.log_t1;
  j["log_t2"] = c.log_t2;
  j["t1_exact"] = c.t1_exact;
  j["t2_exact"] = c.t2_exact;
  if (c.t1_exact) j["t1"] = c.t1;
  if (c.t2_exact) j["t2"] = c.t2;
  j["w"] = c.w;
  j["t3"] = c.t3;
  j["check_1_minus_20eps0_gt_80_81"] = c.check_eps0;
  j["check_m_at_least_9"] = c.check_m_at_least_9;
  auto os = ctx.open("constants.json");
  os << j.dump(2) << "\n";
  auto rec = [&](const char* name, double v, double se = 0.0) {
    EstimateRecord r;
    r.name = name;
    r.value = v;
    r.std_error = se;
    r.replications = c.eps2_reps;
    r.master_seed = cfg.seed;
    ctx.records.push_back(r);
  };
  rec("eps1", c.eps1);
  rec("eps2", c.eps2, c.eps2_se);
  rec("log_delta1", c.log_delta1);
  rec("log_delta2", c.log_delta2);
  rec("log_eps3", c.log_eps3);
  rec("log_t1", c.log_t1);
  rec("log_t2", c.log_t2);
  rec("w", c.w);
  rec("t3", c.t3);
}

void emit_plot_script(RunContext& ctx) {
  if (ctx.plot_sections.empty() && ctx.records.empty()) return;
  auto os = ctx.open("plot.py");
  os << "#!/usr/bin/env python3\n"
     << "# Reads only the CSV files emitted next to this script.\n"
     << "import csv, os, sys\n"
     << "import matplotlib\n"
     << "matplotlib.use('Agg')\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "here = os.path.dirname(os.path.abspath(__file__))\n\n"
     << "def load(name):\n"
     << "    with open(os.path.join(here, name)) as f:\n"
     << "        rows = list(csv.DictReader(f))\n"
     << "    return rows\n\n";
  for (const auto& section : ctx.plot_sections) {
    if (section == "slab_curve.csv") {
      os << "rows = load('slab_curve.csv')\n"
         << "xs = [float(r['M']) for r in rows]\n"
         << "ys = [float(r['lambda_c_hat']) for r in rows]\n"
         << "lo = [float(r['bracket_lo']) for r in rows]\n"
         << "hi = [float(r['bracket_hi']) for r in rows]\n"
         << "plt.errorbar(xs, ys, yerr=[[y-l for y,l in zip(ys,lo)],[h-y for y,h in zip(ys,hi)]], marker='o')\n"
         << "plt.xlabel('slab thickness M'); plt.ylabel('lambda_c estimate')\n"
         << "plt.savefig(os.path.join(here, 'slab_curve.png'), dpi=150)\n"
         << "plt.close()\n\n";
    } else if (section == "decay.csv") {
      os << "rows = load('decay.csv')\n"
         << "xs = [float(r['r']) for r in rows]\n"
         << "ys = [float(r['q_hat']) for r in rows]\n"
         << "plt.semilogy(xs, ys, marker='o')\n"
         << "plt.xlabel('r'); plt.ylabel('q(r)')\n"
         << "plt.savefig(os.path.join(here, 'decay.png'), dpi=150)\n"
         << "plt.close()\n\n";
    } else if (section == "giant.csv") {
      os << "rows = load('giant.csv')\n"
         << "xs = [float(r['s']) for r in rows]\n"
         << "plt.plot(xs, [float(r['l1_ratio']) for r in rows], marker='o', label='L1/(2s)^d')\n"
         << "plt.plot(xs, [float(r['l2_ratio']) for r in rows], marker='s', label='L2/(2s)^d')\n"
         << "plt.xlabel('s'); plt.legend()\n"
         << "plt.savefig(os.path.join(here, 'giant.png'), dpi=150)\n"
         << "plt.close()\n\n";
    }
  }
  os << "print('plots written to', here)\n";
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config) {
  auto start = std::chrono::steady_clock::now();
  RunContext ctx{config, fs::path(config.out_dir), {}, {}, {}};
  fs::create_directories(ctx.out);

  if (config.experiment == "sample") run_sample(ctx);
  else if (config.experiment == "graph") run_graph(ctx);
  else if (config.experiment == "theta") run_theta(ctx);
  else if (config.experiment == "pi-k") run_pi_k(ctx);
  else if (config.experiment == "lambda-c") run_lambda_c(ctx);
  else if (config.experiment == "slab-curve") run_slab_curve(ctx);
  else if (config.experiment == "decay") run_decay(ctx);
  else if (config.experiment == "giant") run_giant(ctx);
  else if (config.experiment == "fkg") run_fkg(ctx);
  else if (config.experiment == "explore") run_explore(ctx);
  else if (config.experiment == "renorm") run_renorm(ctx);
  else if (config.experiment == "oriented") run_oriented(ctx);
  else if (config.experiment == "constants") run_constants(ctx);
  else throw ConfigError("unknown experiment '" + config.experiment + "'");

  {
    auto os = ctx.open("results.csv");
    write_records_csv(ctx.records, os);
  }
  {
    auto os = ctx.open("results.json");
    write_records_json(ctx.records, os);
  }
  if (config.plot) emit_plot_script(ctx);

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["experiment"] = config.experiment;
  manifest["master_seed"] = config.seed;
  manifest["workers"] = ctx.workers();
  manifest["wall_time_s"] = wall;
  manifest["config"] = serialize_config(config);
  manifest["outputs"] = ctx.report.outputs;
  {
    auto os = ctx.open("manifest.json");
    os << manifest.dump(2) << "\n";
  }
  return ctx.report;
}

}  // namespace rcm
