#include <benchmark/benchmark.h>

#include <vector>

#include "ionchain/budget.hpp"
#include "ionchain/constants.hpp"
#include "ionchain/coupling.hpp"
#include "ionchain/crystal.hpp"
#include "ionchain/msgate.hpp"
#include "ionchain/species.hpp"

using namespace ionchain;
using constants::two_pi;

namespace {

crystal::CrystalConfig mixed_pair() {
  return {{species::lookup("40Ca+"), species::lookup("88Sr+")},
          species::lookup("88Sr+"),
          two_pi * 660e3};
}

crystal::CrystalConfig mixed_triple() {
  return {{species::lookup("88Sr+"), species::lookup("40Ca+"), species::lookup("88Sr+")},
          species::lookup("88Sr+"),
          two_pi * 660e3};
}

std::vector<coupling::LaserField> beams(const crystal::CrystalConfig& cc) {
  std::vector<coupling::LaserField> fields;
  for (const auto& ion : cc.ions) {
    bool seen = false;
    for (const auto& f : fields) seen = seen || f.target_species == ion.label;
    if (!seen) fields.push_back({ion.label, ion.wavevector(), 1.0, std::nullopt});
  }
  return fields;
}

msgate::GateParams calibrated_gate() {
  const auto cc = mixed_pair();
  const auto table = coupling::lamb_dicke(crystal::normal_modes(cc), beams(cc), 0.0);
  return msgate::calibrate_gate(table, "IP", 100e-6, 1);
}

void BM_EquilibriumPositions(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(crystal::equilibrium_dimensionless(n));
}
BENCHMARK(BM_EquilibriumPositions)->Arg(3)->Arg(7)->Arg(16);

void BM_NormalModes(benchmark::State& state) {
  const auto cc = mixed_triple();
  for (auto _ : state) benchmark::DoNotOptimize(crystal::normal_modes(cc));
}
BENCHMARK(BM_NormalModes);

void BM_LambDickeTable(benchmark::State& state) {
  const auto cc = mixed_triple();
  const auto modes = crystal::normal_modes(cc);
  const auto fields = beams(cc);
  for (auto _ : state) benchmark::DoNotOptimize(coupling::lamb_dicke(modes, fields, 0.0));
}
BENCHMARK(BM_LambDickeTable);

void BM_PropagateAnalytic(benchmark::State& state) {
  const auto p = calibrated_gate();
  const auto motion = msgate::MotionalSpec::thermal(0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(msgate::propagate_analytic(p, 0.61 * p.gate_time, motion));
}
BENCHMARK(BM_PropagateAnalytic);

void BM_ProtocolFidelity(benchmark::State& state) {
  const auto p = calibrated_gate();
  const auto final_state = msgate::propagate_analytic(p, p.gate_time);
  for (auto _ : state)
    benchmark::DoNotOptimize(msgate::protocol_fidelity(final_state, 65));
}
BENCHMARK(BM_ProtocolFidelity);

void BM_OracleLambDicke(benchmark::State& state) {
  const auto p = calibrated_gate();
  const auto motion = msgate::MotionalSpec::ground_state(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        msgate::propagate_oracle(p, motion, msgate::Hamiltonian::lamb_dicke, p.gate_time));
}
BENCHMARK(BM_OracleLambDicke)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ErrorBudget(benchmark::State& state) {
  const auto cc = mixed_pair();
  for (auto _ : state)
    benchmark::DoNotOptimize(budget::error_2xIP(cc, two_pi * 1e6, 0.0, 1));
}
BENCHMARK(BM_ErrorBudget);

void BM_IsotopeScan(benchmark::State& state) {
  const std::vector<species::IonSpecies> pool = {
      species::lookup("40Ca+"), species::lookup("43Ca+"), species::lookup("88Sr+"),
      species::lookup("86Sr+")};
  for (auto _ : state)
    benchmark::DoNotOptimize(budget::isotope_scan(pool, two_pi * 660e3));
}
BENCHMARK(BM_IsotopeScan)->Unit(benchmark::kMillisecond);

void BM_ModeAdvisor(benchmark::State& state) {
  const auto cc = mixed_triple();
  for (auto _ : state)
    benchmark::DoNotOptimize(budget::mode_advisor(cc, 50e-6, 250e-6, two_pi * 50e3));
}
BENCHMARK(BM_ModeAdvisor);

}  // namespace

BENCHMARK_MAIN();
