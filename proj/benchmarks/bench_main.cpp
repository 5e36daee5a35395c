#include <benchmark/benchmark.h>

#include <rdcontrol/control.hpp>
#include <rdcontrol/examples.hpp>
#include <rdcontrol/mesh.hpp>
#include <rdcontrol/ratelang.hpp>
#include <rdcontrol/solver.hpp>
#include <rdcontrol/system.hpp>

#include <memory>

using namespace rdc;

namespace {

std::shared_ptr<const ratelang::SymbolTable> bench_symbols() {
  auto t = std::make_shared<ratelang::SymbolTable>();
  t->add_constant("k");
  t->add_constant("kappa");
  t->add_variable("Y");
  t->add_variable("YP");
  return t;
}

constexpr const char* kRate = "k*(YP - kappa*Y) + 0.5*tanh(YP/(1 + Y))^2";

void BM_RateParse(benchmark::State& state) {
  auto syms = bench_symbols();
  for (auto _ : state) {
    ratelang::Expr e = ratelang::parse(kRate, syms);
    benchmark::DoNotOptimize(&e);
  }
}
BENCHMARK(BM_RateParse);

void BM_RateEval(benchmark::State& state) {
  auto syms = bench_symbols();
  ratelang::Expr e = ratelang::parse(kRate, syms);
  double vars[2] = {0.4, 0.6};
  double consts[2] = {1.0, 10.0};
  for (auto _ : state) benchmark::DoNotOptimize(e.eval(vars, consts));
}
BENCHMARK(BM_RateEval);

void BM_RateDerivative(benchmark::State& state) {
  auto syms = bench_symbols();
  ratelang::Expr e = ratelang::parse(kRate, syms);
  for (auto _ : state) {
    ratelang::Expr d = e.derivative(1);
    benchmark::DoNotOptimize(&d);
  }
}
BENCHMARK(BM_RateDerivative);

void BM_SteadySlab(benchmark::State& state) {
  auto spec = examples::slab_cycle({});
  Mesh mesh = build_mesh(spec->geometry(), static_cast<int>(state.range(0)));
  DiscreteSystem sys(apply_modulation(spec, ModulationVector::reference(*spec)), mesh);
  std::vector<double> guess = sys.initial_field();
  for (auto _ : state) {
    ConcentrationField f = solve_steady(sys, guess);
    benchmark::DoNotOptimize(f.values.data());
  }
}
BENCHMARK(BM_SteadySlab)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_TransientSlab(benchmark::State& state) {
  auto spec = examples::slab_cycle({});
  Mesh mesh = build_mesh(spec->geometry(), 256);
  DiscreteSystem sys(apply_modulation(spec, ModulationVector::reference(*spec)), mesh);
  std::vector<double> init = sys.initial_field();
  for (auto _ : state) {
    ConcentrationField f = integrate_transient(sys, init, 1.0, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(f.values.data());
  }
}
BENCHMARK(BM_TransientSlab)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_ControlReport(benchmark::State& state) {
  ControlContext ctx;
  ctx.spec = examples::slab_cycle({});
  ctx.n_cells = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ControlEngine engine(ctx);
    ControlReport rep = engine.report({});
    benchmark::DoNotOptimize(rep.reaction_sum);
  }
}
BENCHMARK(BM_ControlReport)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

} // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
