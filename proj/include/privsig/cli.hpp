//
// Copyright 2026 The privsig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line front end. RunCli parses argv and dispatches to one of the
// subcommands solve, sweep, ib, quantize, verify and simulate.
//
// Exit codes: 0 on success, 2 on usage or validation errors, 3 when a
// requested verification fails.

#ifndef PRIVSIG_CLI_HPP_
#define PRIVSIG_CLI_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "privsig/bottleneck.hpp"
#include "privsig/channel.hpp"
#include "privsig/equilibrium.hpp"
#include "privsig/error.hpp"
#include "privsig/matrix.hpp"
#include "privsig/model.hpp"
#include "privsig/serialize.hpp"
#include "privsig/verify.hpp"

namespace privsig::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitVerifyFailed = 3;

inline constexpr const char* kSweepHeader =
    "mode,delta,rho,sigma_x2,sigma_y2,p,sigma_w2,levels,mse_x,mse_y,j_e,j_d,"
    "b_over_a";

// Scalar settings of the ratio table used by the default verify suite.
inline constexpr double kTableRhos[] = {0.3, 0.7};
inline constexpr double kTableDeltas[] = {0.1, 1.0, 10.0};

struct Options {
  std::string mode;
  double sx2 = 1.0;
  double sy2 = 1.0;
  std::optional<double> rho;
  std::optional<double> delta;
  std::optional<double> p;
  std::optional<double> sigma_w2;
  std::optional<int> levels;
  std::optional<double> beta;
  std::optional<double> alpha;
  std::string sigma_file;
  std::optional<std::size_t> nx;
  std::uint64_t seed = 42;
  std::string out;
  std::string format;
  bool verify = false;
  std::vector<double> alphas;
  std::string corrupt;
  std::size_t mc = 100000;
  std::string axis;
  std::vector<double> grid;
  std::string range;
  std::string spacing = "linear";
};

namespace detail {

inline Error Usage(const std::string& message) {
  return Error(ErrorCode::kInvalidArgument, message);
}

inline double Need(const std::optional<double>& v, const char* flag) {
  if (!v) throw Usage(std::string("missing required flag ") + flag);
  return *v;
}

inline std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Whitespace-separated rows of a square matrix; blank lines and lines
// starting with '#' are skipped.
inline SymMatrix ReadSigmaFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Usage("cannot open sigma file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') {
        throw Usage("sigma file " + path + ": bad number '" + tok + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n == 0) throw Usage("sigma file " + path + " is empty");
  Matrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) throw Usage("sigma file " + path + " is not square");
    for (std::size_t c = 0; c < n; ++c) m(r, c) = rows[r][c];
  }
  const double asym = MaxAbsDiff(m, m.transpose());
  if (asym > 1e-12 * std::max(1.0, m.max_abs())) {
    throw Usage("sigma file " + path + " is not symmetric");
  }
  return SymMatrix(m);
}

inline JointGaussian BuildSource(const Options& o) {
  if (!o.sigma_file.empty()) {
    if (!o.nx) throw Usage("--sigma-file needs --nx");
    SymMatrix s = ReadSigmaFile(o.sigma_file);
    if (*o.nx == 0 || *o.nx >= s.dim()) {
      throw Usage("--nx must be between 1 and dim - 1");
    }
    const std::size_t dim = s.dim();
    return JointGaussian(*o.nx, dim - *o.nx, std::move(s));
  }
  return JointGaussian::Scalar(o.sx2, o.sy2, Need(o.rho, "--rho"));
}

inline std::string ResolveFormat(const Options& o, const char* fallback) {
  const std::string f = o.format.empty() ? fallback : o.format;
  if (f != "json" && f != "csv") throw Usage("--format must be json or csv");
  return f;
}

// One line of the sweep table. Empty optionals print as empty cells.
struct Row {
  std::string mode;
  double delta = 0.0;
  double rho = 0.0;
  double sx2 = 1.0;
  double sy2 = 1.0;
  std::optional<double> p;
  std::optional<double> sigma_w2;
  std::optional<int> levels;
  EquilibriumReport report;
  std::optional<double> b_over_a;
};

inline Row MakeRow(const std::string& mode, double delta, double rho, double sx2,
                   double sy2) {
  Row r;
  r.mode = mode;
  r.delta = delta;
  r.rho = rho;
  r.sx2 = sx2;
  r.sy2 = sy2;
  return r;
}

inline std::string CsvLine(const Row& r) {
  auto opt = [](const std::optional<double>& v) { return v ? Num(*v) : std::string(); };
  std::ostringstream s;
  s << r.mode << ',' << Num(r.delta) << ',' << Num(r.rho) << ',' << Num(r.sx2)
    << ',' << Num(r.sy2) << ',' << opt(r.p) << ',' << opt(r.sigma_w2) << ','
    << (r.levels ? std::to_string(*r.levels) : std::string()) << ','
    << Num(r.report.mse_x) << ',' << Num(r.report.mse_y) << ','
    << Num(r.report.j_e) << ',' << Num(r.report.j_d) << ',' << opt(r.b_over_a);
  return s.str();
}

inline Json RowJson(const Row& r) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return {{"mode", r.mode},
          {"delta", r.delta},
          {"rho", r.rho},
          {"sigma_x2", r.sx2},
          {"sigma_y2", r.sy2},
          {"p", opt(r.p)},
          {"sigma_w2", opt(r.sigma_w2)},
          {"levels", r.levels ? Json(*r.levels) : Json(nullptr)},
          {"mse_x", r.report.mse_x},
          {"mse_y", r.report.mse_y},
          {"j_e", r.report.j_e},
          {"j_d", r.report.j_d},
          {"b_over_a", opt(r.b_over_a)}};
}

// Solves one scalar instance of a sweep mode.
inline Row SolveRow(const std::string& mode, double sx2, double sy2, double rho,
                    double delta, std::optional<double> p,
                    std::optional<double> sigma_w2, std::optional<int> levels) {
  Row row = MakeRow(mode, delta, rho, sx2, sy2);
  if (mode == "nash" || mode == "stackelberg" || mode == "scalar") {
    const NashSolution s = SolveScalar(sx2, sy2, rho, delta);
    row.report = s.report;
    row.b_over_a = s.b_over_a;
  } else if (mode == "ib") {
    row.report = SolveMmseIb(JointGaussian::Scalar(sx2, sy2, rho), delta).report;
  } else if (mode == "awgn") {
    if (!p || !sigma_w2) throw Usage("awgn mode needs --p and --sigma-w2");
    const NoisyEquilibrium e = SolveAwgn(sx2, sy2, rho, delta, *p, *sigma_w2);
    row.p = p;
    row.sigma_w2 = sigma_w2;
    row.report = e.report;
    row.b_over_a = e.b_over_a;
  } else if (mode == "discrete") {
    if (!levels) throw Usage("discrete mode needs --levels");
    const DiscreteEquilibrium e = SolveDiscrete(sx2, sy2, rho, delta, *levels);
    row.levels = levels;
    row.report = e.report;
    row.b_over_a = e.b_over_a;
  } else {
    throw Usage("unknown mode '" + mode + "'");
  }
  return row;
}

inline void Emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw Usage("cannot write " + o.out);
  f << text;
}

inline std::string Dump(const Json& body) { return Document(body).dump(2) + "\n"; }

// Scales the second encoder coefficient by 1.05 and refits the decoders.
// Over AWGN the encoder is rescaled back to the power limit.
inline LinearPolicyPair CorruptEncoder(const GameSpec& spec, LinearPolicyPair p) {
  p.f(0, p.f.cols() - 1) *= 1.05;
  if (const auto* awgn = std::get_if<Awgn>(&spec.channel)) {
    p.f = privsig::detail::ToPower(spec, p.f, awgn->power);
  }
  return WithMmseDecoders(spec, p.f);
}

inline bool WantCorrupt(const Options& o) {
  if (o.corrupt.empty()) return false;
  if (o.corrupt != "encoder") throw Usage("--corrupt accepts only 'encoder'");
  return true;
}

struct CheckResult {
  std::string name;
  bool pass;
  Json body;
};

inline StackelbergOptions StackOptions(const Options& o) {
  StackelbergOptions s;
  s.seed = o.seed;
  s.mc_samples = o.mc;
  return s;
}

// Checks for one (mode, instance) pair of the verify subcommand.
inline std::vector<CheckResult> VerifyInstance(const Options& o,
                                               const std::string& mode,
                                               double rho, double delta) {
  std::vector<CheckResult> out;
  const bool corrupt = WantCorrupt(o);
  const std::string where = "rho=" + Num(rho) + " delta=" + Num(delta);
  auto nash = [&](const GameSpec& spec, const LinearPolicyPair& policy) {
    const DeviationReport r = CheckNashScalar(spec, policy);
    out.push_back({"nash " + where, r.certified(), ToJson(r)});
  };
  auto consistency = [&](const GameSpec& spec, const LinearPolicyPair& policy) {
    const ConsistencyReport c = CheckConsistency(spec, policy, o.mc, o.seed);
    out.push_back({"consistency " + where, c.pass, ToJson(c)});
  };
  if (mode == "nash" || mode == "scalar") {
    const NashSolution s = SolveScalar(o.sx2, o.sy2, rho, delta);
    const LinearPolicyPair policy = corrupt ? CorruptEncoder(s.spec, s.policy) : s.policy;
    nash(s.spec, policy);
    consistency(s.spec, policy);
  } else if (mode == "awgn") {
    const NoisyEquilibrium e = SolveAwgn(o.sx2, o.sy2, rho, delta,
                                         Need(o.p, "--p"), Need(o.sigma_w2, "--sigma-w2"));
    const LinearPolicyPair policy =
        corrupt ? CorruptEncoder(e.spec, e.report.policy) : e.report.policy;
    nash(e.spec, policy);
    consistency(e.spec, policy);
  } else if (mode == "discrete") {
    if (corrupt) throw Usage("--corrupt is not available for the discrete mode");
    if (!o.levels) throw Usage("discrete mode needs --levels");
    const DiscreteEquilibrium e = SolveDiscrete(o.sx2, o.sy2, rho, delta, *o.levels);
    const ConsistencyReport c = CheckConsistency(e, o.mc, o.seed);
    out.push_back({"consistency " + where + " levels=" + std::to_string(*o.levels),
                   c.pass, ToJson(c)});
  } else if (mode == "stackelberg") {
    const NashSolution s = SolveScalar(o.sx2, o.sy2, rho, delta);
    const LinearPolicyPair policy = corrupt ? CorruptEncoder(s.spec, s.policy) : s.policy;
    const DeviationReport r = CheckStackelberg(s.spec, policy, StackOptions(o));
    out.push_back({"stackelberg " + where, r.certified(), ToJson(r)});
  } else {
    throw Usage("unknown verify mode '" + mode + "'");
  }
  return out;
}

// Grid from --grid, or from --range start:stop:count with --spacing.
inline std::vector<double> BuildGrid(const Options& o) {
  std::vector<double> g = o.grid;
  if (!o.range.empty()) {
    if (!g.empty()) throw Usage("use either --grid or --range");
    double a = 0.0, b = 0.0;
    int n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream s(o.range);
    if (!(s >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1) {
      throw Usage("--range must be start:stop:count");
    }
    const bool log = o.spacing == "log";
    if (!log && o.spacing != "linear") throw Usage("--spacing must be linear or log");
    if (log && !(a > 0.0 && b > 0.0)) throw Usage("log spacing needs positive ends");
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      g.push_back(log ? a * std::pow(b / a, t) : a + (b - a) * t);
    }
  }
  if (g.empty()) throw Usage("sweep needs --grid or --range");
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (!(g[i] > g[i - 1])) throw Usage("sweep grid must be strictly increasing");
  }
  return g;
}

inline int RunSolve(const Options& o, std::ostream& out) {
  const std::string fmt = ResolveFormat(o, "json");
  const std::string mode = o.mode.empty() ? "scalar" : o.mode;
  const double delta = Need(o.delta, "--delta");
  Json body;
  body["mode"] = mode;
  std::optional<Row> row;
  std::vector<CheckResult> checks;

  if (mode == "scalar" || mode == "nash" || mode == "stackelberg") {
    const JointGaussian src = BuildSource(o);
    const GameSpec spec{src, delta};
    NashSolution s = (src.is_scalar() && o.alphas.empty())
                         ? SolveScalar(o.sx2, o.sy2, *o.rho, delta)
                         : SolveNash(spec, o.alphas.empty()
                                               ? std::nullopt
                                               : std::optional(o.alphas));
    body["solution"] = ToJson(s);
    if (src.is_scalar()) {
      row = MakeRow(mode, delta, *o.rho, o.sx2, o.sy2);
      row->report = s.report;
      row->b_over_a = s.b_over_a;
      body["b_over_a"] = Optional(s.b_over_a);
    }
    if (o.verify) {
      if (src.is_scalar()) {
        const DeviationReport r = CheckNashScalar(s);
        checks.push_back({"nash", r.certified(), ToJson(r)});
      }
      const DeviationReport r = CheckStackelberg(spec, s.policy, StackOptions(o));
      checks.push_back({"stackelberg", r.certified(), ToJson(r)});
    }
  } else if (mode == "awgn") {
    const NoisyEquilibrium e =
        SolveAwgn(o.sx2, o.sy2, Need(o.rho, "--rho"), delta, Need(o.p, "--p"),
                  Need(o.sigma_w2, "--sigma-w2"));
    body["solution"] = ToJson(e);
    body["power_used"] = e.power_used;
    body["b_over_a"] = Optional(e.b_over_a);
    row = SolveRow(mode, o.sx2, o.sy2, *o.rho, delta, o.p, o.sigma_w2, o.levels);
    if (o.verify) {
      const DeviationReport n = CheckNashScalar(e);
      checks.push_back({"nash", n.certified(), ToJson(n)});
      const DeviationReport s = CheckStackelberg(e.spec, e.report.policy, StackOptions(o));
      checks.push_back({"stackelberg", s.certified(), ToJson(s)});
    }
  } else if (mode == "discrete") {
    if (!o.levels) throw Usage("discrete mode needs --levels");
    const DiscreteEquilibrium e =
        SolveDiscrete(o.sx2, o.sy2, Need(o.rho, "--rho"), delta, *o.levels);
    body["solution"] = ToJson(e);
    body["b_over_a"] = Optional(e.b_over_a);
    row = SolveRow(mode, o.sx2, o.sy2, *o.rho, delta, o.p, o.sigma_w2, o.levels);
    if (o.verify) {
      const ConsistencyReport c = CheckConsistency(e, o.mc, o.seed);
      checks.push_back({"consistency", c.pass, ToJson(c)});
    }
  } else if (mode == "ib") {
    const JointGaussian src = BuildSource(o);
    const IBSolution s = SolveMmseIb(src, delta);
    body["solution"] = ToJson(s);
    body["regime"] = IbRegimeName(s.regime);
    if (src.is_scalar()) {
      row = MakeRow(mode, delta, *o.rho, o.sx2, o.sy2);
      row->report = s.report;
    }
    if (o.verify) {
      const ConsistencyReport c =
          CheckConsistency(GameSpec{src, delta}, s.policy, o.mc, o.seed);
      checks.push_back({"consistency", c.pass, ToJson(c)});
    }
  } else {
    throw Usage("unknown solve mode '" + mode + "'");
  }

  bool ok = true;
  if (o.verify) {
    Json v = Json::array();
    for (const CheckResult& c : checks) {
      ok = ok && c.pass;
      Json entry = c.body;
      entry["check"] = c.name;
      v.push_back(std::move(entry));
    }
    body["verification"] = std::move(v);
  }
  if (fmt == "csv") {
    if (!row) throw Usage("csv output needs a scalar source");
    Emit(o, out, std::string(kSweepHeader) + "\n" + CsvLine(*row) + "\n");
  } else {
    Emit(o, out, Dump(body));
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

inline int RunSweep(const Options& o, std::ostream& out) {
  const std::string fmt = ResolveFormat(o, "csv");
  const std::string mode = o.mode.empty() ? "nash" : o.mode;
  if (o.axis.empty()) throw Usage("sweep needs --axis");
  const std::vector<double> grid = BuildGrid(o);
  std::vector<Row> rows;
  for (double v : grid) {
    std::optional<double> rho = o.rho, delta = o.delta, p = o.p, sw = o.sigma_w2;
    std::optional<int> levels = o.levels;
    if (o.axis == "delta") {
      delta = v;
    } else if (o.axis == "rho") {
      rho = v;
    } else if (o.axis == "sigma_w2") {
      if (mode != "awgn") throw Usage("axis sigma_w2 needs --mode awgn");
      sw = v;
    } else if (o.axis == "levels") {
      if (mode != "discrete") throw Usage("axis levels needs --mode discrete");
      if (v != std::floor(v)) throw Usage("levels grid must be integral");
      levels = static_cast<int>(v);
    } else {
      throw Usage("--axis must be delta, rho, sigma_w2 or levels");
    }
    rows.push_back(SolveRow(mode, o.sx2, o.sy2, Need(rho, "--rho"),
                            Need(delta, "--delta"), p, sw, levels));
  }
  if (fmt == "csv") {
    std::string text = std::string(kSweepHeader) + "\n";
    for (const Row& r : rows) text += CsvLine(r) + "\n";
    Emit(o, out, text);
  } else {
    Json arr = Json::array();
    for (const Row& r : rows) arr.push_back(RowJson(r));
    Emit(o, out, Dump({{"axis", o.axis}, {"rows", arr}}));
  }
  return kExitOk;
}

inline int RunIb(const Options& o, std::ostream& out) {
  ResolveFormat(o, "json");
  const int chosen = (o.delta ? 1 : 0) + (o.beta ? 1 : 0) + (o.alpha ? 1 : 0);
  if (chosen != 1) throw Usage("ib needs exactly one of --delta, --beta, --alpha");
  const JointGaussian src = BuildSource(o);
  Json body;
  if (o.delta) {
    const IBSolution s = SolveMmseIb(src, *o.delta);
    body["solver"] = "mmse";
    body["regime"] = IbRegimeName(s.regime);
    body["solution"] = ToJson(s);
  } else if (o.beta) {
    const ChechikSolution s = SolveChechik(src, *o.beta);
    body["solver"] = "mutual_information";
    body["solution"] = ToJson(s);
    body["information"] =
        ToJson(GaussianMutualInformation(src, OnFullSource(src, s.a_matrix, s.noise_cov)));
  } else {
    const ConstrainedIBSolution s = SolveConstrainedIb(src, *o.alpha);
    body["solver"] = "constrained";
    body["solution"] = ToJson(s);
  }
  Emit(o, out, Dump(body));
  return kExitOk;
}

inline int RunQuantize(const Options& o, std::ostream& out) {
  const std::string fmt = ResolveFormat(o, "json");
  if (!o.levels) throw Usage("quantize needs --levels");
  const Quantizer q = LloydMaxGaussian(*o.levels);
  if (fmt == "csv") {
    std::string text = "symbol,lower,upper,reconstruction\n";
    for (int j = 0; j < q.levels; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const std::string lo = j == 0 ? "-inf" : Num(q.boundaries[uj - 1]);
      const std::string hi = j + 1 == q.levels ? "inf" : Num(q.boundaries[uj]);
      text += std::to_string(j) + "," + lo + "," + hi + "," +
              Num(q.reconstructions[uj]) + "\n";
    }
    Emit(o, out, text);
  } else {
    Emit(o, out, Dump({{"quantizer", ToJson(q)}}));
  }
  return kExitOk;
}

// Text verdict lines by default, a JSON document with --format json.
inline int RunVerify(const Options& o, std::ostream& out) {
  if (!o.format.empty() && o.format != "json") {
    throw Usage("verify prints text, or json with --format json");
  }
  const std::string mode = o.mode.empty() ? "nash" : o.mode;
  std::vector<std::pair<double, double>> points;
  if (o.rho || o.delta) {
    points.emplace_back(Need(o.rho, "--rho"), Need(o.delta, "--delta"));
  } else {
    for (double rho : kTableRhos)
      for (double delta : kTableDeltas) points.emplace_back(rho, delta);
  }
  std::vector<CheckResult> checks;
  for (const auto& [rho, delta] : points) {
    for (CheckResult& c : VerifyInstance(o, mode, rho, delta)) {
      checks.push_back(std::move(c));
    }
  }
  bool ok = true;
  for (const CheckResult& c : checks) ok = ok && c.pass;
  if (o.format == "json") {
    Json arr = Json::array();
    for (const CheckResult& c : checks) {
      Json entry = c.body;
      entry["check"] = c.name;
      entry["pass"] = c.pass;
      arr.push_back(std::move(entry));
    }
    Emit(o, out, Dump({{"mode", mode}, {"pass", ok}, {"checks", arr}}));
  } else {
    std::string text;
    for (const CheckResult& c : checks) {
      text += std::string(c.pass ? "PASS " : "FAIL ") + c.name + "\n";
    }
    text += ok ? "all checks passed\n" : "verification failed\n";
    Emit(o, out, text);
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

inline int RunSimulate(const Options& o, std::ostream& out) {
  ResolveFormat(o, "json");
  const std::string mode = o.mode.empty() ? "scalar" : o.mode;
  const double delta = Need(o.delta, "--delta");
  ConsistencyReport c;
  if (mode == "discrete") {
    if (!o.levels) throw Usage("discrete mode needs --levels");
    c = CheckConsistency(SolveDiscrete(o.sx2, o.sy2, Need(o.rho, "--rho"), delta, *o.levels),
                         o.mc, o.seed);
  } else if (mode == "awgn") {
    const NoisyEquilibrium e = SolveAwgn(o.sx2, o.sy2, Need(o.rho, "--rho"), delta,
                                         Need(o.p, "--p"), Need(o.sigma_w2, "--sigma-w2"));
    c = CheckConsistency(e.spec, e.report.policy, o.mc, o.seed);
  } else if (mode == "ib") {
    const JointGaussian src = BuildSource(o);
    c = CheckConsistency(GameSpec{src, delta}, SolveMmseIb(src, delta).policy, o.mc,
                         o.seed);
  } else if (mode == "scalar" || mode == "nash" || mode == "stackelberg") {
    const GameSpec spec{BuildSource(o), delta};
    const NashSolution s =
        SolveNash(spec, o.alphas.empty() ? std::nullopt : std::optional(o.alphas));
    c = CheckConsistency(spec, s.policy, o.mc, o.seed);
  } else {
    throw Usage("unknown simulate mode '" + mode + "'");
  }
  Emit(o, out, Dump({{"mode", mode}, {"seed", o.seed}, {"simulation", ToJson(c)}}));
  return kExitOk;
}

inline void AddSourceFlags(CLI::App* app, Options& o) {
  app->add_option("--sx2", o.sx2, "variance of X");
  app->add_option("--sy2", o.sy2, "variance of Y");
  app->add_option("--rho", o.rho, "covariance of X and Y");
  app->add_option("--delta", o.delta, "privacy ratio");
  app->add_option("--sigma-file", o.sigma_file, "square covariance matrix, X block first");
  app->add_option("--nx", o.nx, "dimension of X for --sigma-file");
  app->add_option("--seed", o.seed, "random seed")->capture_default_str();
  app->add_option("--out", o.out, "write output to this file");
  app->add_option("--format", o.format, "json or csv");
  app->add_option("--mode", o.mode, "solver mode");
}

inline void AddChannelFlags(CLI::App* app, Options& o) {
  app->add_option("--p", o.p, "awgn power limit");
  app->add_option("--sigma-w2", o.sigma_w2, "awgn noise variance");
  app->add_option("--levels", o.levels, "number of discrete symbols");
}

}  // namespace detail

inline int RunCli(int argc, const char* const* argv, std::ostream& out,
                  std::ostream& err) {
  Options o;
  CLI::App app{"Equilibria of the Gaussian privacy-signaling game"};
  app.require_subcommand(1);
  CLI::App* solve = app.add_subcommand("solve", "solve one instance");
  CLI::App* sweep = app.add_subcommand("sweep", "solve a one-parameter grid");
  CLI::App* ib = app.add_subcommand("ib", "information bottleneck solvers");
  CLI::App* quantize = app.add_subcommand("quantize", "Lloyd-Max quantizer");
  CLI::App* verify = app.add_subcommand("verify", "certify equilibria");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo report");
  for (CLI::App* sub : {solve, sweep, ib, quantize, verify, simulate}) {
    detail::AddSourceFlags(sub, o);
    detail::AddChannelFlags(sub, o);
  }
  solve->add_flag("--verify", o.verify, "run equilibrium checks");
  solve->add_option("--alphas", o.alphas, "encoder scalings, comma separated")
      ->delimiter(',');
  for (CLI::App* sub : {solve, verify, simulate}) {
    sub->add_option("--mc", o.mc, "Monte Carlo sample count")->capture_default_str();
  }
  simulate->add_option("--alphas", o.alphas, "encoder scalings")->delimiter(',');
  verify->add_option("--corrupt", o.corrupt, "negative control: 'encoder'");
  sweep->add_option("--axis", o.axis, "delta, rho, sigma_w2 or levels");
  sweep->add_option("--grid", o.grid, "comma separated grid")->delimiter(',');
  sweep->add_option("--range", o.range, "start:stop:count");
  sweep->add_option("--spacing", o.spacing, "linear or log")->capture_default_str();
  ib->add_option("--beta", o.beta, "mutual-information tradeoff");
  ib->add_option("--alpha", o.alpha, "error-trace budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (o.mc == 0) throw detail::Usage("--mc must be positive");
    if (solve->parsed()) return detail::RunSolve(o, out);
    if (sweep->parsed()) return detail::RunSweep(o, out);
    if (ib->parsed()) return detail::RunIb(o, out);
    if (quantize->parsed()) return detail::RunQuantize(o, out);
    if (verify->parsed()) return detail::RunVerify(o, out);
    return detail::RunSimulate(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace privsig::cli

#endif  // PRIVSIG_CLI_HPP_
