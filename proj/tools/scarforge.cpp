#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "scarforge/bch.hpp"
#include "scarforge/dynamics.hpp"
#include "scarforge/io.hpp"
#include "scarforge/logmap.hpp"
#include "scarforge/models.hpp"
#include "scarforge/rules.hpp"
#include "scarforge/spectral.hpp"

extern "C" void openblas_set_num_threads(int);

using namespace scarforge;

namespace {

constexpr int kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitUnknownModel = 4;

// Options that never change the numbers are kept out of the config hash.
bool hashed(const std::string& name) { return name != "help" && name != "config" && name != "out"; }

ConfigMap collect_config(const CLI::App& sub) {
  ConfigMap config{{"command", sub.get_name()}};
  for (const auto* opt : sub.get_options()) {
    auto name = opt->get_single_name();
    if (!hashed(name)) continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
    } else {
      value = opt->get_default_str();
    }
    config[name] = value;
  }
  return config;
}

void check_length(int L) {
  if (L < 4 || L % 2 != 0 || L > 30) throw ConfigError("L must be even and within [4, 30]");
}

std::optional<WorkingSpace> parse_space(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "full") return WorkingSpace::Full;
  if (s == "krylov") return WorkingSpace::Krylov;
  throw ConfigError("--space must be full or krylov");
}

void emit_table(const std::string& path, const RunMetadata& meta, const Table& table, PlotKind kind,
                const std::string& x_label, const std::string& y_label, const std::vector<PlotSeries>& series) {
  if (path.empty()) {
    std::cout << to_csv(meta, table);
  } else if (wants_svg(path)) {
    write_svg(path, meta, kind, x_label, y_label, series);
  } else {
    write_csv(path, meta, table);
  }
}

void emit_json(const std::string& path, const RunMetadata& meta, const nlohmann::json& payload) {
  if (!path.empty()) write_json(path, meta, payload);
}

DenseVector unit_vector(Eigen::Index dim, std::size_t pos, cplx value = 1.0) {
  DenseVector v = DenseVector::Zero(dim);
  v(static_cast<Eigen::Index>(pos)) = value;
  return v;
}

// Sector coordinates of a basis state that is a single sector vector.
DenseVector sector_initial(const SectorBasis& basis, std::uint64_t state) {
  const auto pos = basis.subset->position(state);
  const auto r = basis.owner[pos];
  if (r == BasisSubset::npos || std::abs(std::abs(basis.coefficient[pos]) - 1.0) > 1e-12) {
    throw ConfigError("initial state is not a single vector of the sector");
  }
  return unit_vector(static_cast<Eigen::Index>(basis.size()), r, std::conj(basis.coefficient[pos]));
}

struct Shared {
  std::string model;
  int length = 12;
  std::string out;
};

void add_shared(CLI::App* sub, Shared& s, bool with_model = true) {
  sub->option_defaults()->always_capture_default();
  if (with_model) sub->add_option("--model", s.model, "registry name or model JSON file")->required();
  sub->add_option("-L,--length", s.length, "chain length (even)");
  sub->add_option("--out", s.out, "output file (.csv, .svg or .json; stdout when omitted)");
  sub->add_option("--config", "flat key=value file mirroring the flags (command-line flags win)");
}

// Replaces "--config FILE" by the flags it lists. Keys are long flag names
// without dashes; flags already on the command line are not overridden.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find_if(args.begin(), args.end(),
                         [](const std::string& a) { return a == "--config" || a.rfind("--config=", 0) == 0; });
  if (it == args.end()) return args;
  std::string path;
  if (*it == "--config") {
    if (std::next(it) == args.end()) throw ConfigError("--config needs a file name");
    path = *std::next(it);
    it = args.erase(it, std::next(it, 2));
  } else {
    path = it->substr(9);
    it = args.erase(it);
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  const auto present = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0 || (flag == "--length" && a == "-L");
    });
  };
  std::string line;
  std::vector<std::string> extra;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    const auto trim = [](std::string t) {
      t.erase(0, t.find_first_not_of(" \t\r"));
      t.erase(t.find_last_not_of(" \t\r") + 1);
      return t;
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw ConfigError("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const std::string flag = "--" + key;
    if (present(flag) || (key == "trivial-last-qubit" && present("--any-last-qubit"))) continue;
    if (value == "true") {
      extra.push_back(flag);
    } else if (value == "false") {
      if (key == "trivial-last-qubit") extra.push_back("--any-last-qubit");
    } else {
      extra.push_back(flag);
      std::istringstream words(value);
      for (std::string w; words >> w;) extra.push_back(w);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

RunMetadata meta_for(const CLI::App& sub, const std::string& model, int L) {
  RunMetadata m;
  m.command = sub.get_name();
  m.model = model;
  m.length = L;
  m.config = collect_config(sub);
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scarforge: Floquet-automaton scar diagnostics"};
  app.set_version_flag("--version", kToolVersion);
  int threads = 1;
  auto* threads_opt = app.add_option("--threads", threads, "search worker threads (also SCARFORGE_THREADS; the flag wins)")
      ->envname("SCARFORGE_THREADS")
      ->check(CLI::PositiveNumber);
  app.require_subcommand(1);
  app.fallthrough();
  std::function<int()> action;

  // search
  Shared s_search;
  std::string orbit_name = "neel";
  SearchConstraints cons;
  auto* search = app.add_subcommand("search", "exhaustive search over 3-qubit permutations");
  add_shared(search, s_search, false);
  search->add_option("--orbit", orbit_name, "protected orbit (neel)");
  search->add_option("--order", cons.order, "keep gates with U0^order = 1");
  search->add_flag("--trivial-last-qubit,!--any-last-qubit", cons.trivial_last_qubit,
                   "gate acts trivially on its last qubit");
  search->callback([&] {
    action = [&] {
      if (orbit_name != "neel") throw ConfigError("search supports --orbit neel only");
      check_length(s_search.length);
      cons.length = s_search.length;
      cons.threads = threads;
      SearchStats stats;
      const auto hits = search_models(cons, &stats);
      auto meta = meta_for(*search, "search", s_search.length);
      meta.summary = {{"enumerated", std::to_string(stats.enumerated)},
                      {"order_pass", std::to_string(stats.order_pass)},
                      {"orbit_pass", std::to_string(stats.orbit_pass)}};
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& h : hits) {
        arr.push_back({{"permutation_cycles", h.gate.cycle_notation()},
                       {"satisfied", h.satisfied},
                       {"total", h.total},
                       {"order", h.order}});
      }
      std::cout << hits.size() << " gates pass the filters (" << stats.enumerated << " enumerated)\n";
      for (std::size_t i = 0; i < hits.size() && i < 10; ++i) {
        std::cout << "  " << hits[i].satisfied << "/" << hits[i].total << "  " << hits[i].gate.cycle_notation()
                  << "\n";
      }
      emit_json(s_search.out, meta, arr);
      return kExitOk;
    };
  });

  // rules
  Shared s_rules;
  std::string rule_type = "I", rule_seed;
  auto* rules = app.add_subcommand("rules", "type I / type II rule report over the protected orbit");
  add_shared(rules, s_rules);
  rules->add_option("--type", rule_type, "I or II")->check(CLI::IsMember({"I", "II"}));
  rules->add_option("--seed", rule_seed, "orbit seed state (default: the model's)");
  rules->callback([&] {
    action = [&] {
      const auto m = resolve_model(s_rules.model);
      check_length(s_rules.length);
      const int L = s_rules.length;
      const auto c = m.circuit(L);
      const auto orbit = orbit_of(c, rule_seed.empty() ? m.seed(L) : named_state(rule_seed, L));
      const auto kind = rule_type == "II" ? RuleKind::II : RuleKind::I;
      const auto r = evaluate_rules(c, orbit, kind);
      std::cout << "type " << rule_type << " rules: " << r.satisfied << "/" << r.total << "\n";
      auto meta = meta_for(*rules, m.name, L);
      meta.summary = {{"ratio", std::to_string(r.satisfied) + "/" + std::to_string(r.total)}};
      nlohmann::json outcomes = nlohmann::json::array();
      for (const auto& o : r.outcomes) {
        outcomes.push_back({{"site", o.rule.site},
                            {"powers", {o.rule.s1, o.rule.s2, o.rule.s3}},
                            {"orbit_index", o.rule.orbit_index},
                            {"state", o.state.bits()},
                            {"satisfied", o.satisfied},
                            {"residual", o.residual}});
      }
      nlohmann::json cycle = nlohmann::json::array();
      for (const auto& st : orbit.states) cycle.push_back(st.bits());
      emit_json(s_rules.out, meta,
                {{"kind", rule_type},
                 {"satisfied", r.satisfied},
                 {"total", r.total},
                 {"power_bound", r.power_bound},
                 {"orbit", cycle},
                 {"outcomes", outcomes}});
      return kExitOk;
    };
  });

  // revivals
  Shared s_rev;
  std::string state_name = "neel", rev_sector, rev_space, method = "dense";
  TimeGrid grid;
  int bch_order = 0;
  std::vector<int> z_sites;
  double mc_window = 0.0;
  auto* revivals = app.add_subcommand("revivals", "PR / fidelity traces of e^{-iHt}|state>");
  add_shared(revivals, s_rev);
  revivals->add_option("--state", state_name, "neel, anti-neel, polarized, generic or a bit string");
  revivals->add_option("--tmax", grid.t_max, "final time");
  revivals->add_option("--dt", grid.dt, "time step");
  revivals->add_option("--sector", rev_sector, "evolve in a symmetry sector, e.g. s2+1,usm+1");
  revivals->add_option("--space", rev_space, "working space: full or krylov (default: model policy)");
  revivals->add_option("--bch-order", bch_order, "evolve with C_0 + ... + C_n instead of A + B");
  revivals->add_option("--z-site", z_sites, "add <Z_i(t)> columns for these 1-based sites");
  revivals->add_option("--mc-window", mc_window, "energy window for the microcanonical <Z_i> (adds deviation columns)");
  revivals->add_option("--method", method, "dense or taylor")->check(CLI::IsMember({"dense", "taylor"}));
  revivals->callback([&] {
    action = [&] {
      const auto m = resolve_model(s_rev.model);
      check_length(s_rev.length);
      const int L = s_rev.length;
      if (bch_order < 0 || bch_order > kMaxBchOrder) throw ConfigError("--bch-order out of range");
      if (bch_order > 0 && !rev_sector.empty()) throw ConfigError("--bch-order and --sector are exclusive");
      const auto times = grid.times();
      const auto sub = working_subset(m, L, parse_space(rev_space));
      const auto h = build_hamiltonian(m.circuit(L), sub);
      // The generic state comes from the Krylov set even on the full space,
      // which otherwise offers frozen states such as |0...0> for QMBS-A.
      const std::uint64_t s0 = state_name == "generic"
                                   ? generic_state(*working_subset(m, L, WorkingSpace::Krylov), m.orbit(L))
                                   : named_state(state_name, L).index();
      if (!sub->contains(s0)) throw ConfigError("initial state is outside the working subset");

      EvolutionJob job;
      job.grid = grid;
      job.method = method == "taylor" ? Propagator::Taylor : Propagator::Dense;
      std::optional<SectorBasis> basis;
      if (bch_order > 0) {
        BchOptions opt;
        opt.momenta = {0};
        const auto series = bch_terms(h, bch_order, opt);
        const auto b = sector_of(series, s0);
        basis = series.sectors[b];
        job.hamiltonian = augmented_block(series, bch_order, b).sparseView();
      } else if (!rev_sector.empty()) {
        basis = build_sector(sub, SymmetrySector::parse(rev_sector, L));
        job.hamiltonian = project_sector(h, *basis);
      } else {
        job.hamiltonian = h.H;
      }
      if (basis) {
        job.initial = sector_initial(*basis, s0);
        job.pr_weights = basis->sum_u4;
      } else {
        job.initial = unit_vector(static_cast<Eigen::Index>(sub->size()), sub->position(s0));
      }

      std::vector<RealVector> z_diag;
      for (int site : z_sites) {
        if (site < 1 || site > L) throw ConfigError("--z-site out of range");
        RealVector z(static_cast<Eigen::Index>(sub->size()));
        for (std::size_t p = 0; p < sub->size(); ++p) {
          z(static_cast<Eigen::Index>(p)) = bits::window(sub->state(p), site - 1, 1, L) ? -1.0 : 1.0;
        }
        z_diag.push_back(std::move(z));
      }
      std::vector<double> mc;
      std::optional<DensePropagator> prop;
      if (job.method == Propagator::Dense) prop.emplace(job.hamiltonian);
      if (mc_window > 0.0) {
        if (z_sites.empty()) throw ConfigError("--mc-window needs --z-site");
        if (basis || !prop) throw ConfigError("--mc-window needs dense evolution in subset coordinates");
        for (int site : z_sites) mc.push_back(local_z_trace(*prop, *sub, job.initial, site, mc_window, {}).microcanonical);
      }

      Table table;
      table.columns = {"t", "pr", "fidelity"};
      for (int site : z_sites) table.columns.push_back("z" + std::to_string(site));
      for (int site : z_sites) {
        if (!mc.empty()) table.columns.push_back("z" + std::to_string(site) + "_mc_dev2");
      }
      PlotSeries pr{"PR", {}, {}, {}}, fid{"fidelity", {}, {}, {}};
      const auto record = [&](std::size_t i, const DenseVector& psi) {
        std::vector<Cell> row{times[i], participation_ratio(psi, job.pr_weights), fidelity(psi, job.initial)};
        if (!z_diag.empty()) {
          const DenseVector full = basis ? basis->lift(psi) : psi;
          const RealVector prob = full.cwiseAbs2();
          for (std::size_t k = 0; k < z_diag.size(); ++k) row.push_back(prob.dot(z_diag[k]));
          for (std::size_t k = 0; k < mc.size(); ++k) {
            const double d = std::get<double>(row[3 + k]) - mc[k];
            row.push_back(d * d);
          }
        }
        pr.x.push_back(times[i]);
        pr.y.push_back(std::get<double>(row[1]));
        fid.x.push_back(times[i]);
        fid.y.push_back(std::get<double>(row[2]));
        table.rows.push_back(std::move(row));
      };
      if (prop) {
        prop->evolve(job.initial, times, record);
      } else {
        taylor_evolve(job.hamiltonian, job.initial, times, record);
      }
      auto meta = meta_for(*revivals, m.name, L);
      meta.summary = {{"n_eff", std::to_string(sub->size())},
                      {"dimension", std::to_string(job.hamiltonian.rows())},
                      {"initial_state", BasisState(s0, L).bits()}};
      for (std::size_t k = 0; k < mc.size(); ++k) {
        meta.summary.emplace_back("z" + std::to_string(z_sites[k]) + "_mc", format_number(mc[k]));
      }
      emit_table(s_rev.out, meta, table, PlotKind::Line, "t", "PR / fidelity", {pr, fid});
      return kExitOk;
    };
  });

  // ipr
  Shared s_ipr;
  std::string ipr_space;
  SpectrumOptions spec_opt;
  auto* ipr = app.add_subcommand("ipr", "IPR vs energy with Neel-overlap scar flags");
  add_shared(ipr, s_ipr);
  ipr->add_option("--space", ipr_space, "working space: full or krylov (default: model policy)");
  ipr->add_option("--threshold", spec_opt.threshold, "flag when |<Neel|psi>|^2 exceeds this");
  ipr->callback([&] {
    action = [&] {
      const auto m = resolve_model(s_ipr.model);
      check_length(s_ipr.length);
      const int L = s_ipr.length;
      const auto sub = working_subset(m, L, parse_space(ipr_space));
      const auto h = build_hamiltonian(m.circuit(L), sub);
      for (const auto& st : {BasisState::neel(L), BasisState::anti_neel(L)}) {
        if (sub->contains(st.index())) spec_opt.references.push_back(st.index());
      }
      const auto a = analyze_spectrum(h.H, *sub, spec_opt);
      Table table;
      table.columns = {"E", "IPR", "neel_overlap", "flagged"};
      PlotSeries pts{"eigenstates", {}, {}, {}};
      for (std::size_t k = 0; k < a.size(); ++k) {
        double ov = 0.0;
        for (const auto& o : a.overlap) ov = std::max(ov, o[k]);
        const double e = a.eigenvalues(static_cast<Eigen::Index>(k));
        table.rows.push_back({e, a.ipr[k], ov, static_cast<long long>(a.flagged[k])});
        pts.x.push_back(e);
        pts.y.push_back(a.ipr[k]);
        pts.highlight.push_back(a.flagged[k]);
      }
      auto meta = meta_for(*ipr, m.name, L);
      const auto tower = a.flagged_energies();
      meta.summary = {{"n_eff", std::to_string(sub->size())}, {"flagged_energies", std::to_string(tower.size())}};
      std::cout << a.size() << " eigenstates, " << tower.size() << " distinct flagged energies\n";
      emit_table(s_ipr.out, meta, table, PlotKind::Scatter, "E", "IPR", {pts});
      return kExitOk;
    };
  });

  // rstat
  Shared s_rstat;
  std::string rstat_sector = "s2+1,usm+1", rstat_space;
  bool raw_values = false;
  auto* rstat = app.add_subcommand("rstat", "level-spacing ratio statistics in a symmetry sector");
  add_shared(rstat, s_rstat);
  rstat->add_option("--sector", rstat_sector, "symmetry sector (empty = whole working subset)");
  rstat->add_option("--space", rstat_space, "working space: full or krylov (default: model policy)");
  rstat->add_flag("--values", raw_values, "emit the individual r_n instead of the histogram");
  rstat->callback([&] {
    action = [&] {
      const auto m = resolve_model(s_rstat.model);
      check_length(s_rstat.length);
      const int L = s_rstat.length;
      const auto sub = working_subset(m, L, parse_space(rstat_space));
      const auto h = build_hamiltonian(m.circuit(L), sub);
      SparseOperator hs = h.H;
      if (!rstat_sector.empty()) hs = project_sector(h, build_sector(sub, SymmetrySector::parse(rstat_sector, L)));
      if (static_cast<std::size_t>(hs.rows()) > kDenseLimit) {
        throw ConfigError("sector dimension " + std::to_string(hs.rows()) + " exceeds the dense limit");
      }
      const auto ev = eigvalsh(DenseMatrix(hs));
      const auto rep = r_statistic(ev);
      auto meta = meta_for(*rstat, m.name, L);
      meta.summary = {{"eigenvalues", std::to_string(ev.size())},
                      {"distinct_levels", std::to_string(rep.levels)},
                      {"mean_r", format_number(rep.mean)}};
      std::cout << ev.size() << " eigenvalues, mean r = " << format_number(rep.mean) << "\n";
      Table table;
      PlotSeries hist{"P(r)", {}, {}, {}};
      if (raw_values) {
        table.columns = {"n", "r"};
        for (std::size_t i = 0; i < rep.r_values.size(); ++i) {
          table.rows.push_back({static_cast<long long>(i + 1), rep.r_values[i]});
        }
      } else {
        table.columns = {"r_lo", "r_hi", "density"};
        for (int b = 0; b < kHistogramBins; ++b) {
          const double lo = double(b) / kHistogramBins, hi = double(b + 1) / kHistogramBins;
          table.rows.push_back({lo, hi, rep.histogram[static_cast<std::size_t>(b)]});
          hist.x.insert(hist.x.end(), {lo, hi});
          hist.y.insert(hist.y.end(), 2, rep.histogram[static_cast<std::size_t>(b)]);
        }
      }
      emit_table(s_rstat.out, meta, table, PlotKind::Line, "r", "P(r)", {hist});
      return kExitOk;
    };
  });

  // bch
  Shared s_bch;
  int orders = 4;
  bool with_fgr = false;
  std::string bch_space;
  auto* bch = app.add_subcommand("bch", "BCH term norm profile (orbit / leakage / generic)");
  add_shared(bch, s_bch);
  bch->add_option("--orders", orders, "highest term C_n");
  bch->add_option("--space", bch_space, "working space: full or krylov (default: model policy)");
  bch->add_flag("--fgr", with_fgr, "also report the golden-rule decay rate (needs a full eigensolve)");
  bch->callback([&] {
    action = [&] {
      const auto m = resolve_model(s_bch.model);
      check_length(s_bch.length);
      const int L = s_bch.length;
      if (orders < 0 || orders > kMaxBchOrder) throw ConfigError("--orders out of range");
      if (with_fgr && orders < 2) throw ConfigError("--fgr needs --orders >= 2");
      const auto sub = working_subset(m, L, parse_space(bch_space));
      const auto h = build_hamiltonian(m.circuit(L), sub);
      const auto orbit = m.orbit(L);
      const auto series = bch_terms(h, orders);
      const auto prof = norm_profile(series, orbit);
      Table table;
      table.columns = {"n", "orbit_norm", "leakage_norm", "generic_norm"};
      PlotSeries so{"orbit", {}, {}, {}}, sl{"leakage", {}, {}, {}}, sg{"generic", {}, {}, {}};
      for (const auto& r : prof.rows) {
        table.rows.push_back({static_cast<long long>(r.n), r.orbit_norm, r.leakage_norm, r.generic_norm});
        for (auto* s : {&so, &sl, &sg}) s->x.push_back(r.n);
        so.y.push_back(r.orbit_norm);
        sl.y.push_back(r.leakage_norm);
        sg.y.push_back(r.generic_norm);
      }
      auto meta = meta_for(*bch, m.name, L);
      meta.summary = {{"n_eff", std::to_string(sub->size())}, {"orbit_length", std::to_string(orbit.length())}};
      if (with_fgr) {
        const auto ev = eigvalsh(DenseMatrix(h.H));
        const auto est = fgr_rate(prof, L, ev(ev.size() - 1) - ev(0));
        meta.summary.emplace_back("bandwidth", format_number(est.bandwidth));
        meta.summary.emplace_back("fgr_rate", format_number(est.rate));
        std::cout << "golden-rule decay rate " << format_number(est.rate) << " (bandwidth "
                  << format_number(est.bandwidth) << ")\n";
      }
      emit_table(s_bch.out, meta, table, PlotKind::Line, "n", "norm", {so, sl, sg});
      return kExitOk;
    };
  });

  // sga-check
  Shared s_sga;
  double epsilon = kPi;
  auto* sga = app.add_subcommand("sga-check", "QMBS-C ladder relation ([H, Q+] - eps Q+) W = 0");
  add_shared(sga, s_sga, false);
  sga->add_option("--epsilon", epsilon, "ladder spacing to test");
  sga->callback([&] {
    action = [&] {
      check_length(s_sga.length);
      const auto r = sga_check(s_sga.length, epsilon);
      std::cout << "residual " << format_number(r.residual) << " over " << r.w_dimension << " W states\n";
      auto meta = meta_for(*sga, "qmbs-c", s_sga.length);
      emit_json(s_sga.out, meta, {{"epsilon", epsilon}, {"residual", r.residual}, {"w_dimension", r.w_dimension}});
      return kExitOk;
    };
  });

  // spinrep-check
  Shared s_spin;
  auto* spin = app.add_subcommand("spinrep-check", "compare the spin-operator form of h0 with i log U0");
  add_shared(spin, s_spin);
  spin->callback([&] {
    action = [&] {
      const auto m = resolve_model(s_spin.model);
      const double dev = verify_spin_representation(m);
      std::cout << "max deviation " << format_number(dev) << "\n";
      auto meta = meta_for(*spin, m.name, 0);
      emit_json(s_spin.out, meta, {{"max_deviation", dev}});
      return kExitOk;
    };
  });

  // orbit
  Shared s_orbit;
  std::string orbit_seed;
  auto* orbit = app.add_subcommand("orbit", "U_F cycle of a basis state and its Floquet eigenphases");
  add_shared(orbit, s_orbit);
  orbit->add_option("--seed", orbit_seed, "seed state (default: the model's)");
  orbit->callback([&] {
    action = [&] {
      const auto m = resolve_model(s_orbit.model);
      check_length(s_orbit.length);
      const int L = s_orbit.length;
      const auto seed = orbit_seed.empty() ? m.seed(L) : named_state(orbit_seed, L);
      const auto o = orbit_of(m.circuit(L), seed);
      nlohmann::json cycle = nlohmann::json::array(), betas = nlohmann::json::array();
      for (const auto& st : o.states) cycle.push_back(st.bits());
      for (const auto& e : floquet_eigenstates(o)) betas.push_back(e.beta);
      std::cout << "orbit of " << seed.bits() << ": length " << o.length() << ", Phi = " << format_number(o.phi) << "\n";
      auto meta = meta_for(*orbit, m.name, L);
      emit_json(s_orbit.out, meta,
                {{"seed", seed.bits()}, {"cycle", cycle}, {"length", o.length()}, {"Phi", o.phi}, {"eigenphases", betas}});
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
  // CLI11 silently skips environment values that fail validation.
  const char* env_threads = std::getenv("SCARFORGE_THREADS");
  if (threads < 1 || (env_threads && *env_threads && threads_opt->count() == 0)) {
    std::cerr << "configuration error: thread count must be positive\n";
    return kExitConfig;
  }
  // Threaded BLAS reductions reorder sums, which would make outputs depend on
  // the thread count; dense algebra stays sequential and --threads drives the
  // search workers.
  openblas_set_num_threads(1);
  try {
    return action ? action() : kExitConfig;
  } catch (const UnknownModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnknownModel;
  } catch (const NumericalGuardError& e) {
    std::cerr << "numerical guard: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
