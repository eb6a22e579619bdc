#include "hypercone/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "hypercone/io.hpp"

namespace hypercone {

namespace {

struct Common {
  std::string input;
  std::string output;
  std::string format = "json";
  std::optional<std::uint64_t> budget;
};

struct Outcome {
  int code = kExitOk;
  Json result;
  std::string csv;  // used when the command supports --format csv
};

Budget effective_budget(const Common& c) {
  Budget b = budget_from_env();
  if (c.budget) {
    if (*c.budget == 0) throw Error(ErrorKind::InvalidInput, "--budget must be positive");
    b.enumeration_cap = *c.budget;
  }
  return b;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::UnknownLabel:
      return kExitInput;
    case ErrorKind::Budget:
      return kExitBudget;
    default:
      return kExitFinding;
  }
}

void add_common(CLI::App* sub, Common& c, bool csv) {
  sub->add_option("input", c.input, "Input JSON file")->required();
  sub->add_option("-o,--output", c.output, "Write the report here instead of stdout");
  if (csv) {
    sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  }
  sub->add_option("--budget", c.budget, "Word enumeration cap (overrides HYPERCONE_BUDGET)");
}

Json base_config(const std::string& command, const Common& c, const Budget& b) {
  return Json{{"command", command}, {"input", c.input}, {"format", c.format}, {"budget", b.enumeration_cap}};
}

// Multicone from --multicone, or from the search.  Empty result carries the search report.
struct ConeChoice {
  std::optional<Multicone> u;
  std::string source;
  Json search;
};

ConeChoice choose_multicone(const IfsSystem& sys, const std::string& path, const Budget& budget) {
  ConeChoice c;
  if (!path.empty()) {
    c.u = parse_multicone(read_text_file(path), path);
    c.source = "input";
    return c;
  }
  const auto found = find_multicone(sys, {}, budget);
  c.source = "search";
  c.u = found.multicone;
  c.search = Json{{"found", found.multicone.has_value()},
                  {"attempts", found.attempts},
                  {"diagnostic", found.diagnostic},
                  {"obstruction", to_json(found.obstruction, sys.labels())}};
  return c;
}

std::vector<double> weights_or_uniform(const IfsSystem& sys, Json& notes) {
  if (sys.weights()) return *sys.weights();
  notes.push_back("no weights in input; using the uniform vector");
  return std::vector<double>(sys.size(), 1.0 / static_cast<double>(sys.size()));
}

std::vector<double> parse_grid(const std::string& text, const MatrixFamily& f) {
  double lo = f.t_lo, hi = f.t_hi;
  long count = 11;
  if (!text.empty()) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    try {
      if (parts.size() == 1) {
        count = std::stol(parts[0]);
      } else if (parts.size() == 3) {
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
        count = std::stol(parts[2]);
      } else {
        throw std::invalid_argument("grid");
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidInput, "--grid expects COUNT or LO:HI:COUNT");
    }
  }
  if (count < 1 || count > 100000) throw Error(ErrorKind::InvalidInput, "--grid count must be in [1, 100000]");
  if (count > 1 && !(hi > lo)) throw Error(ErrorKind::InvalidInput, "--grid needs LO < HI");
  std::vector<double> g;
  for (long k = 0; k < count; ++k) {
    g.push_back(count == 1 ? lo : (k == count - 1 ? hi : lo + (hi - lo) * static_cast<double>(k) / (count - 1)));
  }
  return g;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperbolic SL2 systems: multicones, dimension, separation and cone contraction"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  std::function<Outcome()> action;

  // multicone
  std::string verify_path;
  MulticoneSearchParams search;
  auto* mc = app.add_subcommand("multicone", "Find or verify a strictly invariant multicone");
  add_common(mc, common, false);
  mc->add_option("--verify", verify_path, "Multicone JSON to verify instead of searching");
  mc->add_option("--grid", search.grid, "Seed grid size")->check(CLI::PositiveNumber);
  mc->add_option("--depth", search.depth, "Orbit depth per seed")->check(CLI::PositiveNumber);
  mc->add_option("--seed", search.seed, "Search seed");
  mc->add_option("--elliptic-max-len", search.elliptic_max_len, "Longest word checked for ellipticity")
      ->check(CLI::PositiveNumber);
  mc->callback([&] {
    action = [&] {
      const Budget b = effective_budget(common);
      const IfsSystem sys = to_ifs(parse_system(read_text_file(common.input), common.input));
      Outcome o;
      Json cfg = base_config("multicone", common, b);
      cfg["verify"] = verify_path.empty() ? Json() : Json(verify_path);
      cfg["grid"] = search.grid;
      cfg["depth"] = search.depth;
      cfg["seed"] = search.seed;
      cfg["elliptic_max_len"] = search.elliptic_max_len;
      o.result["config"] = cfg;
      if (!verify_path.empty()) {
        const Multicone u = parse_multicone(read_text_file(verify_path), verify_path);
        const auto cert = verify_strict_invariance(sys, u);
        o.result["multicone"] = to_json(u);
        o.result["certificate"] = to_json(cert, sys.labels());
        o.code = cert.verified() ? kExitOk : kExitFinding;
        return o;
      }
      const auto found = find_multicone(sys, search, b);
      o.result["found"] = found.multicone.has_value();
      o.result["multicone"] = found.multicone ? to_json(*found.multicone) : Json();
      o.result["certificate"] = found.certificate ? to_json(*found.certificate, sys.labels()) : Json();
      o.result["obstruction"] = to_json(found.obstruction, sys.labels());
      o.result["attempts"] = found.attempts;
      o.result["diagnostic"] = found.diagnostic;
      o.code = found.multicone ? kExitOk : kExitFinding;
      return o;
    };
  });

  // dimension
  int dim_n = 12;
  std::string dim_cone;
  auto* dm = app.add_subcommand("dimension", "Estimate the attractor dimension");
  add_common(dm, common, true);
  dm->add_option("--n", dim_n, "Word length")->check(CLI::PositiveNumber);
  dm->add_option("--multicone", dim_cone, "Multicone JSON (searched for when absent)");
  dm->callback([&] {
    action = [&] {
      const Budget b = effective_budget(common);
      const IfsSystem sys = to_ifs(parse_system(read_text_file(common.input), common.input));
      Outcome o;
      Json cfg = base_config("dimension", common, b);
      cfg["n"] = dim_n;
      cfg["multicone"] = dim_cone.empty() ? Json() : Json(dim_cone);
      o.result["config"] = cfg;
      const auto choice = choose_multicone(sys, dim_cone, b);
      o.result["multicone_source"] = choice.source;
      if (!choice.search.is_null()) o.result["search"] = choice.search;
      if (!choice.u) {
        o.result["multicone"] = Json();
        o.code = kExitFinding;
        return o;
      }
      o.result["multicone"] = to_json(*choice.u);
      const auto rep = attractor_dimension(sys, *choice.u, dim_n, b);
      o.result["report"] = to_json(rep);
      std::ostringstream csv;
      csv << "quantity,value\n";
      auto row = [&](const char* q, std::optional<double> v) {
        csv << q << ',' << (v ? csv_number(*v) : std::string()) << '\n';
      };
      row("n", rep.n);
      row("dim_estimate", rep.dim_estimate);
      row("dim_dn_estimate", rep.dim_dn_estimate);
      row("d_n", rep.d_n);
      row("s_estimate", rep.s_estimate);
      row("s_a_estimate", rep.s_a_estimate);
      row("q_n", rep.q_n);
      row("bracket_lo", rep.bracket ? std::optional<double>(rep.bracket->first) : std::nullopt);
      row("bracket_hi", rep.bracket ? std::optional<double>(rep.bracket->second) : std::nullopt);
      row("r1", rep.constants.r1);
      row("lambda", rep.constants.lambda);
      row("c", rep.constants.c);
      row("c_hyp", rep.constants.c_hyp);
      row("c_distortion", rep.constants.c_distortion);
      row("total_length", rep.total_length);
      row("margin", rep.margin);
      row("n0", rep.n0 ? std::optional<double>(*rep.n0) : std::nullopt);
      o.csv = csv.str();
      return o;
    };
  });

  // furstenberg
  std::uint64_t f_steps = 100000, f_seed = 0, f_burn = 1000;
  auto* fu = app.add_subcommand("furstenberg", "Lyapunov exponents and the stationary-measure dimension");
  add_common(fu, common, false);
  fu->add_option("--steps", f_steps, "Chain length")->check(CLI::PositiveNumber);
  fu->add_option("--seed", f_seed, "Random seed")->required();
  fu->add_option("--burn-in", f_burn, "Discarded initial steps");
  fu->callback([&] {
    action = [&] {
      const Budget b = effective_budget(common);
      const IfsSystem sys = to_ifs(parse_system(read_text_file(common.input), common.input));
      Outcome o;
      Json cfg = base_config("furstenberg", common, b);
      cfg["steps"] = f_steps;
      cfg["seed"] = f_seed;
      cfg["burn_in"] = f_burn;
      o.result["config"] = cfg;
      Json notes = Json::array();
      const auto p = weights_or_uniform(sys, notes);
      o.result["weights"] = p;
      const auto choice = choose_multicone(sys, "", b);
      o.result["multicone"] = choice.u ? to_json(*choice.u) : Json();
      const auto fd = furstenberg_dimension(sys, p, choice.u, f_steps, f_seed, f_burn);
      o.result["report"] = to_json(fd);
      const auto sample = furstenberg_sample(sys, p, f_steps, f_burn, f_seed);
      o.result["stationarity_residual"] = stationarity_residual(sample, sys, p);
      std::ostringstream hash;
      hash << std::hex << sample.symbol_stream_hash;
      o.result["symbol_stream_hash"] = hash.str();
      if (sample.warning) notes.push_back(*sample.warning);
      o.result["notes"] = notes;
      return o;
    };
  });

  // separation
  int sep_n = 8;
  SeparationOptions sep_opt;
  auto* sp = app.add_subcommand("separation", "Exponential separation profile for n = 1..N");
  add_common(sp, common, true);
  sp->add_option("--n", sep_n, "Largest word length")->check(CLI::PositiveNumber);
  sp->add_option("--collision-tol", sep_opt.collision_tol, "Distance counted as a collision");
  sp->callback([&] {
    action = [&] {
      const Budget b = effective_budget(common);
      const SystemSpec spec = parse_system(read_text_file(common.input), common.input);
      Outcome o;
      Json cfg = base_config("separation", common, b);
      cfg["n"] = sep_n;
      cfg["collision_tol"] = sep_opt.collision_tol;
      cfg["exact_limit"] = sep_opt.exact_limit;
      cfg["window"] = sep_opt.window;
      cfg["seed"] = sep_opt.seed;
      o.result["config"] = cfg;
      std::vector<int> ns;
      for (int k = 1; k <= sep_n; ++k) ns.push_back(k);
      std::vector<SeparationProfile> profiles;
      double c_fit = INFINITY;
      if (spec.dimension == 2) {
        auto fit = exponential_rate_fit(to_ifs(spec), ns, sep_opt, b);
        profiles = std::move(fit.per_n);
        c_fit = fit.c_fit;
      } else {
        for (int k : ns) {
          profiles.push_back(separation_profile(spec.matrices, k, sep_opt, b));
          if (profiles.back().c_n) c_fit = std::min(c_fit, *profiles.back().c_n);
        }
      }
      Json table = Json::array();
      std::ostringstream csv;
      csv << "n,min_gap_strong,min_gap_weak,c_n\n";
      for (const auto& p : profiles) {
        table.push_back(to_json(p, spec.labels));
        csv << p.n << ',' << csv_number(p.min_gap_strong) << ',' << csv_number(p.min_gap_weak) << ','
            << (p.c_n ? csv_number(*p.c_n) : std::string()) << '\n';
      }
      o.result["profiles"] = table;
      o.result["c_fit"] = std::isinf(c_fit) ? Json() : Json(c_fit);
      o.csv = csv.str();
      return o;
    };
  });

  // family-scan
  std::string grid_text;
  int scan_n = 6;
  auto* fs = app.add_subcommand("family-scan", "Separation along a one-parameter family");
  add_common(fs, common, true);
  fs->add_option("--grid", grid_text, "COUNT or LO:HI:COUNT (default: 11 points over t_range)");
  fs->add_option("--n", scan_n, "Word length")->check(CLI::PositiveNumber);
  fs->callback([&] {
    action = [&] {
      const Budget b = effective_budget(common);
      const MatrixFamily fam = parse_family(read_text_file(common.input), common.input);
      const auto grid = parse_grid(grid_text, fam);
      Outcome o;
      Json cfg = base_config("family-scan", common, b);
      cfg["grid"] = grid;
      cfg["n"] = scan_n;
      o.result["config"] = cfg;
      const auto rows = family_scan(fam, grid, scan_n, {}, b);
      Json table = Json::array();
      std::ostringstream csv;
      csv << "t,c_n,min_gap\n";
      for (const auto& r : rows) {
        table.push_back({{"t", r.t}, {"c_n", r.c_n ? Json(*r.c_n) : Json()}, {"min_gap", r.min_gap}});
        csv << csv_number(r.t) << ',' << (r.c_n ? csv_number(*r.c_n) : std::string()) << ','
            << csv_number(r.min_gap) << '\n';
      }
      o.result["rows"] = table;
      o.csv = csv.str();
      return o;
    };
  });

  // cone
  int cone_n = 6, cone_samples = 32;
  std::uint64_t cone_seed = 1;
  auto* cn = app.add_subcommand("cone", "Strict cone invariance and Hilbert-metric contraction");
  add_common(cn, common, false);
  cn->add_option("--n", cone_n, "Longest word for the contraction fit")->check(CLI::PositiveNumber);
  cn->add_option("--samples", cone_samples, "Sample points in the cross-section")->check(CLI::PositiveNumber);
  cn->add_option("--seed", cone_seed, "Sampling seed");
  cn->callback([&] {
    action = [&] {
      const Budget b = effective_budget(common);
      const SystemSpec spec = parse_system(read_text_file(common.input), common.input);
      const SimplicialCone cone = cone_of(spec);
      Outcome o;
      Json cfg = base_config("cone", common, b);
      cfg["n"] = cone_n;
      cfg["samples"] = cone_samples;
      cfg["seed"] = cone_seed;
      o.result["config"] = cfg;
      o.result["cone"] = to_json(Mat(cone.basis().transpose()));
      Json maps = Json::object();
      bool all = true;
      for (std::size_t i = 0; i < spec.matrices.size(); ++i) {
        const auto r = strict_invariance_cone(spec.matrices[i], cone);
        all = all && r.invariant;
        maps[spec.labels[i]] = to_json(r);
      }
      o.result["maps"] = maps;
      if (!all) {
        o.result["contraction"] = Json();
        o.code = kExitFinding;
        return o;
      }
      const auto est = cone_contraction_estimate(spec.matrices, cone, cone_n, cone_samples, cone_seed, b);
      o.result["contraction"] = to_json(est);
      o.code = est.contracting ? kExitOk : kExitFinding;
      return o;
    };
  });

  // attractor
  int att_depth = 12, lo_exp = 4, hi_exp = 16;
  std::string att_cone;
  auto* at = app.add_subcommand("attractor", "Attractor sample and box-counting slope");
  add_common(at, common, true);
  at->add_option("--depth", att_depth, "Word length of the sample")->check(CLI::PositiveNumber);
  at->add_option("--multicone", att_cone, "Multicone JSON (searched for when absent)");
  at->add_option("--min-exp", lo_exp, "Coarsest box size 2^-min_exp")->check(CLI::NonNegativeNumber);
  at->add_option("--max-exp", hi_exp, "Finest box size 2^-max_exp")->check(CLI::PositiveNumber);
  at->callback([&] {
    action = [&] {
      const Budget b = effective_budget(common);
      const IfsSystem sys = to_ifs(parse_system(read_text_file(common.input), common.input));
      if (hi_exp <= lo_exp || hi_exp > 60) throw Error(ErrorKind::InvalidInput, "need min-exp < max-exp <= 60");
      Outcome o;
      Json cfg = base_config("attractor", common, b);
      cfg["depth"] = att_depth;
      cfg["multicone"] = att_cone.empty() ? Json() : Json(att_cone);
      cfg["min_exp"] = lo_exp;
      cfg["max_exp"] = hi_exp;
      o.result["config"] = cfg;
      const auto choice = choose_multicone(sys, att_cone, b);
      if (!choice.u) {
        o.result["search"] = choice.search;
        o.code = kExitFinding;
        return o;
      }
      const auto pts = attractor_sample(sys, *choice.u, att_depth, b);
      std::vector<double> scales;
      for (int e = lo_exp; e <= hi_exp; ++e) scales.push_back(std::ldexp(1.0, -e));
      o.result["multicone"] = to_json(*choice.u);
      o.result["points"] = pts.size();
      o.result["box_counting_slope"] = box_counting(pts, scales);
      std::ostringstream csv;
      csv << "theta\n";
      for (const auto& p : pts) csv << csv_number(p.theta) << '\n';
      o.csv = csv.str();
      return o;
    };
  });

  std::vector<std::string> argv_store{"hypercone"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    Outcome o = action();
    Json report{{"tool", "hypercone"}, {"version", kVersion}};
    for (auto& [k, v] : o.result.items()) report[k] = v;
    const std::string text = common.format == "csv" && !o.csv.empty() ? o.csv : dump_json(report);
    if (common.output.empty()) {
      out << text;
    } else {
      std::ofstream f(common.output, std::ios::binary);
      if (!f || !(f << text)) {
        err << "error: cannot write " << common.output << '\n';
        return kExitInput;
      }
    }
    if (o.code == kExitFinding) err << "negative finding; see the report\n";
    return o.code;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFinding;
  }
}

}  // namespace hypercone
