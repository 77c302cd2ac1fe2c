// Benchmark: compiled bit-parallel evaluator (OpenMP where available)
// against the serial per-cell reference evaluator, on the same inputs.

#include <chrono>
#include <iomanip>
#include <iostream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aot/model.hpp"
#include "aot/naive_eval.hpp"
#include "aot/parser.hpp"
#include "aot/paradox.hpp"
#include "aot/printer.hpp"
#include "aot/semantics.hpp"

using namespace aot;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Case {
  std::string name;
  ModelConfig config;
  std::string formula;
  bool naive_feasible;
};

}  // namespace

int main(int argc, char** argv) {
  int repeats = argc > 1 ? std::atoi(argv[1]) : 3;

  std::vector<Case> cases = {
      {"A1 closure, M0", {1, 1, 1, 1, {}, {}}, "O!(x) -> box ~exists F. x[F]", true},
      {"abstract identity, M0", {1, 1, 1, 1, {}, {}},
       "A!(x) & A!(y) -> (x = y <-> box forall F.(x[F] <-> y[F]))", true},
      {"comprehension, (0,1,2,1)", {0, 1, 2, 1, {}, {}},
       "exists x.(A!(x) & forall F.(x[F] <-> F = K))", true},
      {"encoding rigidity, M1", {1, 1, 1, 2, {}, {}}, "x[F] -> box x[F]", false},
      {"lambda fiber, M1", {1, 1, 1, 2, {}, {}},
       "forall y.([\\x. F(x) & G(x)](y) <-> F(y) & G(y))", false},
  };

  std::cout << "evaluator benchmark (repeats: " << repeats << ")\n";
#ifdef _OPENMP
  std::cout << "openmp threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "openmp: off\n";
#endif
  std::cout << std::left << std::setw(28) << "case" << std::setw(14) << "compiled(ms)"
            << std::setw(14) << "naive(ms)" << "speedup\n";

  for (const Case& c : cases) {
    AczelModel m = AczelModel::build(c.config);
    FormulaPtr f = parse_formula(c.formula);

    double fast_ms = 0;
    bool fast_result = false;
    for (int r = 0; r < repeats; ++r) {
      Evaluator ev(m);
      auto t0 = Clock::now();
      fast_result = ev.valid(f);
      fast_ms += ms_since(t0);
    }
    fast_ms /= repeats;

    double naive_ms = -1;
    if (c.naive_feasible) {
      NaiveEvaluator nv(m);
      naive_ms = 0;
      bool naive_result = false;
      for (int r = 0; r < repeats; ++r) {
        auto t0 = Clock::now();
        naive_result = nv.valid(f);
        naive_ms += ms_since(t0);
      }
      naive_ms /= repeats;
      if (naive_result != fast_result) {
        std::cout << "MISMATCH on " << c.name << "\n";
        return 1;
      }
    }

    std::cout << std::left << std::setw(28) << c.name << std::setw(14) << std::fixed
              << std::setprecision(3) << fast_ms;
    if (naive_ms >= 0)
      std::cout << std::setw(14) << naive_ms << std::setprecision(1) << (naive_ms / fast_ms)
                << "x";
    else
      std::cout << std::setw(14) << "(skipped)" << "-";
    std::cout << "\n";
  }
  return 0;
}
