#pragma once

// Line-oriented circuit description format.
//
//   prepare <site> @<cycle> <state>     state: |0>, |1>, |vac>, a|0>+b|1>, (re+imj)|0>+...
//   cnot <control> <target> @<cycle>
//   gate <NAME> <site>... @<cycle>      NAME: X, Z, H, CNOT, PHASE(theta)
//   dilate <site> +<cycles>
//   discard <site>
//   output <site> @<cycle>
//
// `#` starts a comment. Gates may only couple components that sit at the same cycle; the
// parser tracks which cycles each site occupies and rejects misaligned gates.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tde/dynamics.hpp"
#include "tde/json_io.hpp"
#include "tde/measures.hpp"

namespace tde::circuit {

struct StateTerm {
  BasisLevel level = BasisLevel::zero;
  Complex coefficient = 1.0;

  friend bool operator==(const StateTerm&, const StateTerm&) = default;
};

struct StateSpec {
  std::vector<StateTerm> terms;

  int dim() const {
    for (const auto& t : terms)
      if (t.level == BasisLevel::vac) return 3;
    return 2;
  }

  friend bool operator==(const StateSpec&, const StateSpec&) = default;
};

struct Prepare {
  std::string site;
  int cycle = 0;
  StateSpec state;
  friend bool operator==(const Prepare&, const Prepare&) = default;
};

struct Cnot {
  std::string control;
  std::string target;
  int cycle = 0;
  friend bool operator==(const Cnot&, const Cnot&) = default;
};

struct GateOp {
  std::string name;  // upper case
  std::optional<double> parameter;
  std::vector<std::string> sites;
  int cycle = 0;
  friend bool operator==(const GateOp&, const GateOp&) = default;
};

struct Dilate {
  std::string site;
  int cycles = 1;
  friend bool operator==(const Dilate&, const Dilate&) = default;
};

struct Discard {
  std::string site;
  friend bool operator==(const Discard&, const Discard&) = default;
};

struct Output {
  std::string site;
  int cycle = 0;
  friend bool operator==(const Output&, const Output&) = default;
};

using Directive = std::variant<Prepare, Cnot, GateOp, Dilate, Discard, Output>;

struct CircuitProgram {
  std::vector<Directive> directives;
  friend bool operator==(const CircuitProgram&, const CircuitProgram&) = default;
};

// ---------------------------------------------------------------------------------------------
// printing

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::string format_coefficient(Complex c) {
  if (c.imag() == 0.0) return format_real(c.real());
  if (c.real() == 0.0) return format_real(c.imag()) + "j";
  const double im = c.imag();
  return "(" + format_real(c.real()) + (std::signbit(im) ? "-" : "+") + format_real(std::abs(im)) + "j)";
}

}  // namespace detail

inline std::string to_text(const StateSpec& s) {
  std::string out;
  for (std::size_t k = 0; k < s.terms.size(); ++k) {
    const auto& t = s.terms[k];
    std::string coef;
    if (t.coefficient == Complex(1.0))
      coef = "";
    else if (t.coefficient == Complex(-1.0))
      coef = "-";
    else
      coef = detail::format_coefficient(t.coefficient);
    if (k > 0 && (coef.empty() || coef.front() != '-')) out += "+";
    out += coef + "|" + to_string(t.level) + ">";
  }
  return out;
}

inline std::string to_text(const Directive& d) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Prepare>)
          return "prepare " + x.site + " @" + std::to_string(x.cycle) + " " + to_text(x.state);
        else if constexpr (std::is_same_v<T, Cnot>)
          return "cnot " + x.control + " " + x.target + " @" + std::to_string(x.cycle);
        else if constexpr (std::is_same_v<T, GateOp>) {
          std::string s = "gate " + x.name;
          if (x.parameter) s += "(" + format_real(*x.parameter) + ")";
          for (const auto& site : x.sites) s += " " + site;
          return s + " @" + std::to_string(x.cycle);
        } else if constexpr (std::is_same_v<T, Dilate>)
          return "dilate " + x.site + " +" + std::to_string(x.cycles);
        else if constexpr (std::is_same_v<T, Discard>)
          return "discard " + x.site;
        else
          return "output " + x.site + " @" + std::to_string(x.cycle);
      },
      d);
}

inline std::string to_text(const CircuitProgram& p) {
  std::string out;
  for (const auto& d : p.directives) out += to_text(d) + "\n";
  return out;
}

// ---------------------------------------------------------------------------------------------
// parsing

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool valid_site(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

inline std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  if (!s.empty() && s.front() == '+') return std::nullopt;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

// Parses a finite real at the front of `s`; advances `s` past it.
inline std::optional<double> take_real(std::string_view& s) {
  double v = 0.0;
  if (s.empty() || s.front() == '+') return std::nullopt;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || !std::isfinite(v)) return std::nullopt;
  s.remove_prefix(static_cast<std::size_t>(p - s.data()));
  return v;
}

inline std::optional<double> parse_real(std::string_view s) {
  auto v = take_real(s);
  if (!v || !s.empty()) return std::nullopt;
  return v;
}

struct Fail {
  std::size_t line;
  [[noreturn]] void operator()(const std::string& msg) const { throw ParseError(line, msg); }
};

inline Complex take_parenthesized(std::string_view& s, const Fail& fail) {
  s.remove_prefix(1);  // '('
  const auto first = take_real(s);
  if (!first) fail("bad number in complex coefficient");
  Complex c;
  if (!s.empty() && s.front() == 'j') {
    s.remove_prefix(1);
    c = Complex(0.0, *first);
  } else if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    const double sign = s.front() == '-' ? -1.0 : 1.0;
    s.remove_prefix(1);
    const auto im = take_real(s);
    if (!im || s.empty() || s.front() != 'j') fail("complex coefficient must look like (re+imj)");
    s.remove_prefix(1);
    c = Complex(*first, sign * *im);
  } else {
    c = Complex(*first, 0.0);
  }
  if (s.empty() || s.front() != ')') fail("missing ')' in complex coefficient");
  s.remove_prefix(1);
  return c;
}

inline StateSpec parse_state(std::string_view text, const Fail& fail) {
  std::string compact;
  for (char c : text)
    if (c != ' ' && c != '\t') compact += c;
  if (compact.empty()) fail("prepare needs a state such as |0> or a|0>+b|1>");
  std::string_view s = compact;
  StateSpec spec;
  bool first = true;
  while (!s.empty()) {
    double sign = 1.0;
    if (s.front() == '+' || s.front() == '-') {
      sign = s.front() == '-' ? -1.0 : 1.0;
      s.remove_prefix(1);
    } else if (!first) {
      fail("expected '+' or '-' between state terms");
    }
    Complex coef = 1.0;
    if (!s.empty() && s.front() == '(') {
      coef = take_parenthesized(s, fail);
    } else if (!s.empty() && s.front() != '|') {
      const auto v = take_real(s);
      if (!v) fail("bad coefficient in state '" + compact + "'");
      coef = *v;
      if (!s.empty() && s.front() == 'j') {
        s.remove_prefix(1);
        coef = Complex(0.0, *v);
      }
    }
    if (s.empty() || s.front() != '|') fail("expected a ket such as |0> in state '" + compact + "'");
    s.remove_prefix(1);
    const auto close = s.find('>');
    if (close == std::string_view::npos) fail("unterminated ket in state '" + compact + "'");
    const auto label = s.substr(0, close);
    s.remove_prefix(close + 1);
    BasisLevel level;
    if (label == "0")
      level = BasisLevel::zero;
    else if (label == "1")
      level = BasisLevel::one;
    else if (label == "vac")
      level = BasisLevel::vac;
    else
      fail("unknown ket |" + std::string(label) + ">; use |0>, |1> or |vac>");
    for (const auto& t : spec.terms)
      if (t.level == level) fail("ket |" + std::string(label) + "> appears twice");
    spec.terms.push_back({level, sign * coef});
    first = false;
  }
  double norm = 0.0;
  for (const auto& t : spec.terms) norm += std::norm(t.coefficient);
  if (std::abs(norm - 1.0) > 1e-9) fail("state '" + compact + "' is not normalized (norm^2 = " + format_real(norm) + ")");
  return spec;
}

inline int parse_cycle(const std::string& tok, const Fail& fail) {
  if (tok.size() < 2 || tok.front() != '@') fail("expected a cycle like @0, got '" + tok + "'");
  const auto v = parse_int(std::string_view(tok).substr(1));
  if (!v) fail("bad cycle '" + tok + "'");
  return *v;
}

inline std::string parse_site(const std::string& tok, const Fail& fail) {
  if (!valid_site(tok)) fail("bad site name '" + tok + "'");
  return tok;
}

inline GateOp parse_gate_head(const std::string& tok, const Fail& fail) {
  std::string upper;
  for (char c : tok) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  GateOp g;
  const auto open = upper.find('(');
  if (open == std::string::npos) {
    g.name = upper;
  } else {
    if (upper.back() != ')') fail("missing ')' in gate '" + tok + "'");
    g.name = upper.substr(0, open);
    const auto v = parse_real(std::string_view(tok).substr(open + 1, tok.size() - open - 2));
    if (!v) fail("bad gate parameter in '" + tok + "'");
    g.parameter = *v;
  }
  if (g.name == "PHASE") {
    if (!g.parameter) fail("PHASE needs an angle, e.g. PHASE(0.5)");
  } else if (g.name == "X" || g.name == "Z" || g.name == "H" || g.name == "CNOT") {
    if (g.parameter) fail("gate " + g.name + " takes no parameter");
  } else {
    fail("unknown gate '" + tok + "'");
  }
  return g;
}

inline std::size_t gate_arity(const std::string& name) { return name == "CNOT" ? 2 : 1; }

// Cycle bookkeeping used to reject programs before anything is simulated.
class Checker {
 public:
  void prepare(const Prepare& p, const Fail& fail) {
    if (sites_.count(p.site)) fail("site " + p.site + " is already prepared");
    if (dilated_) fail("prepare after dilate is not supported; prepare every site first");
    sites_[p.site] = {{p.cycle}, false};
  }

  void gate(const std::vector<std::string>& sites, int cycle, const std::string& name, const Fail& fail) {
    for (std::size_t i = 0; i < sites.size(); ++i) {
      live(sites[i], fail);
      for (std::size_t j = 0; j < i; ++j)
        if (sites[i] == sites[j]) fail(name + " uses site " + sites[i] + " twice");
    }
    for (const auto& s : sites)
      if (!sites_.at(s).cycles.count(cycle))
        fail("cycle misalignment: site " + s + " has no component at cycle " + std::to_string(cycle));
  }

  void dilate(const Dilate& d, const Fail& fail) {
    live(d.site, fail);
    if (d.cycles < 1) fail("dilate needs a shift of at least +1");
    if (dilated_) fail("only one dilate per program is supported");
    std::optional<int> common;
    for (const auto& [name, info] : sites_) {
      if (info.discarded) continue;
      const int c = *info.cycles.begin();
      if (common && *common != c) fail("dilate requires every live site at one cycle");
      common = c;
    }
    for (auto& [name, info] : sites_) {
      if (info.discarded) continue;
      const int c = *common;
      info.cycles = name == d.site ? std::set<int>{c + d.cycles, c + 2 * d.cycles} : std::set<int>{c, c + d.cycles};
    }
    dilated_ = true;
  }

  void discard(const Discard& d, const Fail& fail) {
    live(d.site, fail);
    sites_[d.site].discarded = true;
  }

  void output(const Output& o, const Fail& fail) {
    live(o.site, fail);
    if (!sites_.at(o.site).cycles.count(o.cycle))
      fail("site " + o.site + " has no component at cycle " + std::to_string(o.cycle));
  }

 private:
  struct Info {
    std::set<int> cycles;
    bool discarded = false;
  };

  void live(const std::string& site, const Fail& fail) const {
    const auto it = sites_.find(site);
    if (it == sites_.end()) fail("undeclared site " + site);
    if (it->second.discarded) fail("site " + site + " was discarded");
  }

  std::map<std::string, Info> sites_;
  bool dilated_ = false;
};

}  // namespace detail

// Parses and validates a program. Throws ParseError naming the offending line.
inline CircuitProgram parse_circuit(std::string_view text) {
  CircuitProgram program;
  detail::Checker checker;
  std::optional<std::size_t> output_line;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const detail::Fail fail{line_no};
    if (output_line) fail("output must be the final directive (output on line " + std::to_string(*output_line) + ")");
    const auto tok = detail::split_ws(line);
    const std::string& op = tok[0];
    const auto want = [&](std::size_t n) {
      if (tok.size() != n)
        fail(op + " takes " + std::to_string(n - 1) + " arguments, got " + std::to_string(tok.size() - 1));
    };

    if (op == "prepare") {
      if (tok.size() < 4) fail("prepare takes a site, a cycle and a state");
      Prepare p{detail::parse_site(tok[1], fail), detail::parse_cycle(tok[2], fail), {}};
      std::string state;
      for (std::size_t i = 3; i < tok.size(); ++i) state += tok[i];
      p.state = detail::parse_state(state, fail);
      checker.prepare(p, fail);
      program.directives.emplace_back(std::move(p));
    } else if (op == "cnot") {
      want(4);
      Cnot c{detail::parse_site(tok[1], fail), detail::parse_site(tok[2], fail), detail::parse_cycle(tok[3], fail)};
      checker.gate({c.control, c.target}, c.cycle, "cnot", fail);
      program.directives.emplace_back(std::move(c));
    } else if (op == "gate") {
      if (tok.size() < 4) fail("gate takes a name, one or more sites and a cycle");
      GateOp g = detail::parse_gate_head(tok[1], fail);
      for (std::size_t i = 2; i + 1 < tok.size(); ++i) g.sites.push_back(detail::parse_site(tok[i], fail));
      g.cycle = detail::parse_cycle(tok.back(), fail);
      if (g.sites.size() != detail::gate_arity(g.name))
        fail("gate " + g.name + " acts on " + std::to_string(detail::gate_arity(g.name)) + " site(s)");
      checker.gate(g.sites, g.cycle, g.name, fail);
      program.directives.emplace_back(std::move(g));
    } else if (op == "dilate") {
      want(3);
      if (tok[2].size() < 2 || tok[2].front() != '+') fail("dilate shift must look like +1");
      const auto n = detail::parse_int(std::string_view(tok[2]).substr(1));
      if (!n) fail("bad dilate shift '" + tok[2] + "'");
      Dilate d{detail::parse_site(tok[1], fail), *n};
      checker.dilate(d, fail);
      program.directives.emplace_back(std::move(d));
    } else if (op == "discard") {
      want(2);
      Discard d{detail::parse_site(tok[1], fail)};
      checker.discard(d, fail);
      program.directives.emplace_back(std::move(d));
    } else if (op == "output") {
      want(3);
      Output o{detail::parse_site(tok[1], fail), detail::parse_cycle(tok[2], fail)};
      checker.output(o, fail);
      output_line = line_no;
      program.directives.emplace_back(std::move(o));
    } else {
      fail("unknown directive '" + op + "'");
    }
  }
  if (!output_line) throw ParseError(0, "missing output directive");
  return program;
}

// ---------------------------------------------------------------------------------------------
// execution

inline PureState prepared_state(const Prepare& p) {
  const int dim = p.state.dim();
  const Register reg({{{p.site, p.cycle}, dim}});
  Vector v = Vector::Zero(dim);
  for (const auto& t : p.state.terms) v(static_cast<Eigen::Index>(level_index(t.level, dim))) = t.coefficient;
  return PureState::normalized(reg, std::move(v));
}

inline Gate make_gate(const GateOp& g) {
  if (g.name == "X") return Gate::x();
  if (g.name == "Z") return Gate::z();
  if (g.name == "H") return Gate::h();
  if (g.name == "CNOT") return Gate::cnot();
  if (g.name == "PHASE") return Gate::phase(g.parameter.value_or(0.0));
  throw DomainError("unknown gate " + g.name);
}

struct ExecutionReport {
  std::vector<Prepare> inputs;
  DensityOperator rho_in;                 // product of every prepared state
  std::optional<DensityOperator> rho_s;   // state just before the dilation
  std::optional<DensityOperator> rho_d;   // slots at the output cycle right after the dilation
  DensityOperator final_state;            // all live slots after the last directive
  DensityOperator rho_out;
  SlotId output;
};

namespace detail {

inline DensityOperator expand_dilation(const DensityOperator& rho, const Dilate& d) {
  // Shift everything to the post-dilation cycle of the dilated site, then build both copies.
  const DensityOperator moved = tde::detail::shift_all(rho, d.cycles);
  return displaced_expansion(moved, d.cycles, d.site, Correlation::uncorrelated_copies);
}

inline std::vector<SlotId> slots_not_of(const Register& reg, const std::string& site) {
  std::vector<SlotId> keep;
  for (const auto& s : reg.slots())
    if (s.id.site != site) keep.push_back(s.id);
  return keep;
}

}  // namespace detail

// Runs a validated program. Deterministic; errors from the simulator carry directive context.
inline ExecutionReport execute(const CircuitProgram& program) {
  std::optional<DensityOperator> state;
  std::optional<DensityOperator> rho_in;
  std::optional<DensityOperator> rho_s;
  std::optional<DensityOperator> after_dilation;
  std::vector<Prepare> inputs;
  std::optional<Output> output;

  for (std::size_t k = 0; k < program.directives.size(); ++k) {
    const auto& directive = program.directives[k];
    try {
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Prepare>) {
              const DensityOperator rho = to_density(prepared_state(x));
              state = state ? tensor(*state, rho) : rho;
              rho_in = rho_in ? tensor(*rho_in, rho) : rho;
              inputs.push_back(x);
            } else if constexpr (std::is_same_v<T, Cnot>) {
              *state = apply_gate(*state, Gate::cnot(), {SlotId{x.control, x.cycle}, SlotId{x.target, x.cycle}});
            } else if constexpr (std::is_same_v<T, GateOp>) {
              std::vector<SlotId> targets;
              for (const auto& s : x.sites) targets.push_back({s, x.cycle});
              *state = apply_gate(*state, make_gate(x), targets);
            } else if constexpr (std::is_same_v<T, Dilate>) {
              rho_s = *state;
              state = detail::expand_dilation(*state, x);
              after_dilation = *state;
            } else if constexpr (std::is_same_v<T, Discard>) {
              state = partial_trace(*state, detail::slots_not_of(state->reg(), x.site));
            } else {
              output = x;
            }
          },
          directive);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw Error("directive " + std::to_string(k + 1) + " '" + to_text(directive) + "': " + e.what());
    }
  }
  if (!output || !state) throw DomainError("program has no output directive or no prepared sites");

  const SlotId out_slot{output->site, output->cycle};
  std::optional<DensityOperator> rho_d;
  if (after_dilation && !after_dilation->reg().at_cycle(out_slot.cycle).empty())
    rho_d = measure_at_cycle(*after_dilation, out_slot.cycle);
  DensityOperator rho_out = partial_trace(*state, {out_slot});
  return {std::move(inputs), *rho_in, std::move(rho_s), std::move(rho_d), *state, std::move(rho_out), out_slot};
}

inline nlohmann::json to_json(const ExecutionReport& r) {
  nlohmann::json prepared = nlohmann::json::array();
  for (const auto& p : r.inputs) prepared.push_back({{"site", p.site}, {"cycle", p.cycle}, {"state", to_text(p.state)}});
  const auto opt = [](const std::optional<DensityOperator>& m) -> nlohmann::json {
    return m ? tde::to_json(*m) : nlohmann::json(nullptr);
  };
  const auto opt_entropy = [](const std::optional<DensityOperator>& m) -> nlohmann::json {
    return m ? nlohmann::json(von_neumann_entropy(*m)) : nlohmann::json(nullptr);
  };
  return {{"input", {{"prepare", prepared}, {"rho_in", tde::to_json(r.rho_in)}}},
          {"rho_s", opt(r.rho_s)},
          {"rho_d", opt(r.rho_d)},
          {"rho_out", tde::to_json(r.rho_out)},
          {"entropies",
           {{"S_in", von_neumann_entropy(r.rho_in)},
            {"S_rho_s", opt_entropy(r.rho_s)},
            {"S_rho_d", opt_entropy(r.rho_d)},
            {"S_final", von_neumann_entropy(r.final_state)},
            {"S_out", von_neumann_entropy(r.rho_out)}}}};
}

// The six-line program for the nonlinear circuit with input sqrt(1-beta^2)|0> + sqrt(beta^2)|1>.
inline std::string fig1_program_text(double beta_sq, int tau = 1) {
  if (beta_sq < 0.0 || beta_sq > 1.0) throw DomainError("beta^2 must lie in [0, 1]");
  if (tau < 1) throw DomainError("tau must be at least 1");
  const std::string t = std::to_string(tau);
  return "prepare q1 @0 " + format_real(std::sqrt(1.0 - beta_sq)) + "|0>+" + format_real(std::sqrt(beta_sq)) +
         "|1>\n"
         "prepare q2 @0 |0>\n"
         "cnot q1 q2 @0\n"
         "dilate q1 +" + t + "\n"
         "cnot q1 q2 @" + t + "\n"
         "output q2 @" + t + "\n";
}

}  // namespace tde::circuit
