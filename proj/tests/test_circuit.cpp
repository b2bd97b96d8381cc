#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "tde/circuit.hpp"
#include "tde/scenarios.hpp"

using namespace tde;
using namespace tde::circuit;

namespace {

constexpr double kTol = 1e-12;

std::string parse_error_of(const std::string& text) {
  try {
    parse_circuit(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse_circuit(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

const std::vector<std::string> kPrograms = {
    "prepare q1 @0 |0>\noutput q1 @0\n",
    "prepare q1 @0 0.6|0>+0.8|1>\nprepare q2 @0 |0>\ncnot q1 q2 @0\ndilate q1 +1\ncnot q1 q2 @1\noutput q2 @1\n",
    "prepare a @3 |1>\nprepare b @3 |0>\ncnot a b @3\ndilate b +2\ncnot a b @5\noutput a @5\n",
    "prepare q1 @0 (0.6+0.8j)|1>\noutput q1 @0\n",
    "prepare q1 @0 0.5j|0>+(0.5-0.5j)|1>-0.5|vac>\ngate X q1 @0\noutput q1 @0\n",
    "prepare q1 @-2 |vac>\nprepare q2 @-2 |0>\ngate CNOT q1 q2 @-2\noutput q2 @-2\n",
    "prepare q1 @0 0.70710678118654757|0>+0.70710678118654757|1>\ngate H q1 @0\ngate PHASE(0.25) q1 @0\noutput q1 @0\n",
    "prepare x @0 |0>\nprepare y @0 |1>\nprepare z @0 |0>\ndiscard z\ndilate x +1\ncnot x y @1\noutput y @1\n",
    "prepare q1 @0 -1|1>\ngate Z q1 @0\noutput q1 @0\n",
    "prepare q_1 @7 0.28|0>-0.96|1>\nprepare q_2 @7 |0>\ncnot q_1 q_2 @7\ndilate q_1 +4\ngate PHASE(-3.5) q_2 @11\noutput q_2 @7\n",
    "prepare s @0 1e-1|0>+0.99498743710661997|1>\ngate X s @0\ndiscard s\nprepare t @0 |0>\noutput t @0\n",
};

}  // namespace

TEST(Circuit, NonlinearProgramMatchesDirectSimulation) {
  for (double b2 : {0.0, 0.1, 0.25, 0.5, 0.8, 1.0}) {
    const auto report = execute(parse_circuit(fig1_program_text(b2)));
    const auto direct = run_fig1(qubit_from_beta_sq(b2));
    EXPECT_EQ(report.output, (SlotId{"q2", 1}));
    EXPECT_LE(linalg::max_abs(report.rho_out.matrix() - direct.rho_out.matrix()), kTol) << b2;
    ASSERT_TRUE(report.rho_d.has_value());
    EXPECT_LE(linalg::max_abs(report.rho_d->matrix() - direct.rho_d.matrix()), kTol);
    ASSERT_TRUE(report.rho_s.has_value());
    EXPECT_LE(linalg::max_abs(report.rho_s->matrix() - direct.rho_s.matrix()), kTol);
  }
}

TEST(Circuit, QuarterGivesFiveEighths) {
  const auto r = execute(parse_circuit(fig1_program_text(0.25)));
  EXPECT_NEAR(r.rho_out.matrix()(0, 0).real(), 0.625, kTol);
  EXPECT_NEAR(r.rho_out.matrix()(1, 1).real(), 0.375, kTol);
  EXPECT_NEAR(std::abs(r.rho_out.matrix()(0, 1)), 0.0, kTol);
}

TEST(Circuit, WithoutDilationTheAncillaReturnsToZero) {
  const auto r = execute(parse_circuit(
      "prepare q1 @0 0.6|0>+0.8|1>\nprepare q2 @0 |0>\ncnot q1 q2 @0\ncnot q1 q2 @0\noutput q2 @0\n"));
  EXPECT_NEAR(r.rho_out.matrix()(0, 0).real(), 1.0, kTol);
  EXPECT_FALSE(r.rho_s.has_value());
  EXPECT_FALSE(r.rho_d.has_value());
}

TEST(Circuit, LargerShift) {
  const auto r = execute(parse_circuit(fig1_program_text(0.25, 2)));
  EXPECT_EQ(r.output, (SlotId{"q2", 2}));
  EXPECT_NEAR(r.rho_out.matrix()(0, 0).real(), 0.625, kTol);
}

TEST(Circuit, ExecutionIsDeterministic) {
  const auto p = parse_circuit(kPrograms[9]);
  EXPECT_EQ(to_json(execute(p)).dump(), to_json(execute(p)).dump());
}

TEST(Circuit, JsonReportShape) {
  const auto j = to_json(execute(parse_circuit(fig1_program_text(0.25))));
  EXPECT_EQ(j.at("input").at("prepare").size(), 2u);
  EXPECT_TRUE(j.contains("rho_s"));
  EXPECT_TRUE(j.contains("rho_d"));
  EXPECT_NEAR(j.at("entropies").at("S_in").get<double>(), 0.0, 1e-9);
  EXPECT_NEAR(j.at("rho_out").at("matrix").at(0).at(0).at(0).get<double>(), 0.625, kTol);
}

TEST(CircuitParse, EmptyProgramNeedsOutput) {
  EXPECT_EQ(parse_error_of(""), "missing output directive");
  EXPECT_EQ(parse_error_of("# only a comment\n\n"), "missing output directive");
  EXPECT_EQ(parse_error_line(""), 0u);
}

TEST(CircuitParse, UndeclaredSiteNamedWithLine) {
  const std::string text = "prepare q1 @0 |0>\nprepare q2 @0 |0>\n\ncnot q1 q3 @0\noutput q2 @0\n";
  const auto msg = parse_error_of(text);
  EXPECT_NE(msg.find("q3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
  EXPECT_EQ(parse_error_line(text), 4u);
}

TEST(CircuitParse, CycleMisalignment) {
  const auto msg =
      parse_error_of("prepare q1 @0 |0>\nprepare q2 @0 |0>\ndilate q1 +1\ncnot q1 q2 @0\noutput q2 @1\n");
  EXPECT_NE(msg.find("cycle misalignment"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 4"), std::string::npos);
}

TEST(CircuitParse, StructuralErrors) {
  EXPECT_EQ(parse_error_line("prepare q1 @0 |0>\noutput q1 @0\ngate X q1 @0\n"), 3u);
  EXPECT_EQ(parse_error_line("prepare q1 @0 |0>\nprepare q1 @0 |1>\noutput q1 @0\n"), 2u);
  EXPECT_EQ(parse_error_line("prepare q1 @0 |0>\ndilate q1 +1\ndilate q1 +1\noutput q1 @2\n"), 3u);
  EXPECT_EQ(parse_error_line("prepare q1 @0 |0>\ndilate q1 +1\nprepare q2 @1 |0>\noutput q1 @2\n"), 3u);
  EXPECT_EQ(parse_error_line("prepare q1 @0 |0>\nprepare q2 @1 |0>\ndilate q1 +1\noutput q1 @1\n"), 3u);
  EXPECT_EQ(parse_error_line("prepare q1 @0 |0>\ndiscard q1\noutput q1 @0\n"), 3u);
  EXPECT_EQ(parse_error_line("prepare q1 @0 |0>\ndilate q1 +0\noutput q1 @0\n"), 2u);
  EXPECT_EQ(parse_error_line("prepare q1 @0 |0>\ncnot q1 q1 @0\noutput q1 @0\n"), 2u);
}

TEST(CircuitParse, StateGrammar) {
  EXPECT_EQ(parse_error_line("prepare q1 @0 0.6|0>+0.6|1>\noutput q1 @0\n"), 1u);
  EXPECT_EQ(parse_error_line("prepare q1 @0 |2>\noutput q1 @0\n"), 1u);
  EXPECT_EQ(parse_error_line("prepare q1 @0 |0>|1>\noutput q1 @0\n"), 1u);
  EXPECT_EQ(parse_error_line("prepare q1 @0 |0>+|0>\noutput q1 @0\n"), 1u);
  EXPECT_EQ(parse_error_line("prepare q1 @0 (0.6+0.8|0>\noutput q1 @0\n"), 1u);
  const auto p = parse_circuit("prepare q1 @0 0.6 |0> - 0.8j |1>   # spaces are fine\noutput q1 @0\n");
  const auto& prep = std::get<Prepare>(p.directives[0]);
  ASSERT_EQ(prep.state.terms.size(), 2u);
  EXPECT_EQ(prep.state.terms[1].coefficient, Complex(0.0, -0.8));
  EXPECT_EQ(prep.state.dim(), 2);
  const auto v = parse_circuit("prepare q1 @0 |vac>\noutput q1 @0\n");
  EXPECT_EQ(std::get<Prepare>(v.directives[0]).state.dim(), 3);
}

TEST(CircuitParse, PrintParseRoundTrip) {
  ASSERT_GE(kPrograms.size(), 10u);
  for (const auto& text : kPrograms) {
    const auto p = parse_circuit(text);
    const auto printed = to_text(p);
    EXPECT_EQ(parse_circuit(printed), p) << printed;
    EXPECT_EQ(to_text(parse_circuit(printed)), printed);
    EXPECT_NO_THROW(execute(p)) << text;
  }
}

TEST(CircuitParse, MalformedInputsThrowParseErrorOnly) {
  const std::vector<std::string> bad = {
      "prepare",
      "prepare q1",
      "prepare q1 0 |0>",
      "prepare q1 @x |0>",
      "prepare q1 @0 |0",
      "prepare q1 @0 |0>\ncnot q1 @0\noutput q1 @0",
      "prepare q1 @0 |0>\ngate Y q1 @0\noutput q1 @0",
      "prepare q1 @0 |0>\ngate PHASE q1 @0\noutput q1 @0",
      "prepare q1 @0 |0>\ngate X(1) q1 @0\noutput q1 @0",
      "prepare q1 @0 |0>\ngate PHASE(abc) q1 @0\noutput q1 @0",
      "prepare q1 @0 |0>\ndilate q1 1\noutput q1 @0",
      "prepare q1 @0 |0>\ndilate q1 +x\noutput q1 @0",
      "prepare q1 @0 |0>\nfrobnicate\noutput q1 @0",
      "prepare 1$ @0 |0>\noutput 1$ @0",
      "prepare q1 @0 nan|0>\noutput q1 @0",
      "prepare q1 @0 inf|0>\noutput q1 @0",
      "prepare q1 @0 |0>\noutput q1 @1",
      "prepare q1 @0 |0>\noutput q1",
      "prepare q1 @99999999999999999999 |0>\noutput q1 @0",
  };
  for (const auto& text : bad) {
    try {
      parse_circuit(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ParseError&) {
    } catch (const std::exception& e) {
      ADD_FAILURE() << "wrong exception for '" << text << "': " << e.what();
    }
  }
}

TEST(CircuitParse, FuzzNeverEscapesParseError) {
  const std::vector<std::string> pieces = {"prepare", "cnot", "gate",  "dilate", "discard", "output", "q1",  "q2",
                                           "@0",      "@1",   "@-1",   "+1",     "|0>",     "|1>",    "|vac>", "0.6",
                                           "0.8",     "(",    ")",     "+",      "-",       "j",      "#",   "X",
                                           "PHASE(",  "H",    "\n",    "\n",     " ",       "|",      ">",   "@"};
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::uniform_int_distribution<int> len(0, 40);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < 3000; ++i) {
    std::string text;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) {
      if (i % 3 == 0)
        text += static_cast<char>(byte(rng));
      else
        text += pieces[pick(rng)] + (k % 2 ? " " : "");
    }
    try {
      const auto p = parse_circuit(text);
      EXPECT_EQ(parse_circuit(to_text(p)), p);
    } catch (const ParseError&) {
    } catch (const std::exception& e) {
      ADD_FAILURE() << "wrong exception: " << e.what();
    }
  }
}

TEST(CircuitSamples, ShippedProgramsRun) {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(TDE_CIRCUITS_DIR)) {
    if (entry.path().extension() != ".tdc") continue;
    std::ifstream in(entry.path());
    std::stringstream ss;
    ss << in.rdbuf();
    const auto p = parse_circuit(ss.str());
    EXPECT_EQ(parse_circuit(to_text(p)), p) << entry.path();
    EXPECT_NO_THROW(execute(p)) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 1u);
}
