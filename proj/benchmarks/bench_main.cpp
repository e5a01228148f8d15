#include <gchp/calibration.hpp>
#include <gchp/hawkes.hpp>
#include <gchp/limits.hpp>
#include <gchp/predict.hpp>
#include <gchp/synthetic.hpp>

#include <benchmark/benchmark.h>

namespace {

const gchp::HawkesParams kParams(1.0, 0.5, 1.0);

gchp::GchpGenerator generator() {
    Eigen::Matrix2d P;
    P << 0.6, 0.4, 0.3, 0.7;
    return {kParams, {0.005, -0.005}, gchp::TransitionMatrix(P), 0, 100.0, 0.01};
}

void BM_LogLikelihood(benchmark::State& state) {
    const auto events = gchp::simulate(kParams, static_cast<double>(state.range(0)) / 2.0, 1);
    for (auto _ : state) benchmark::DoNotOptimize(gchp::log_likelihood(kParams, events));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size()));
}
BENCHMARK(BM_LogLikelihood)->Arg(10'000)->Arg(100'000)->Arg(1'000'000);

void BM_Simulate(benchmark::State& state) {
    std::uint64_t seed = 0;
    std::size_t n = 0;
    for (auto _ : state) {
        const auto events = gchp::simulate(kParams, static_cast<double>(state.range(0)), ++seed);
        n += events.size();
        benchmark::DoNotOptimize(events.times().data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Simulate)->Arg(10'000)->Arg(100'000);

void BM_FitMle(benchmark::State& state) {
    const auto events = gchp::simulate(kParams, static_cast<double>(state.range(0)) / 2.0, 2);
    for (auto _ : state) benchmark::DoNotOptimize(gchp::fit_mle(events).log_likelihood);
    state.counters["events"] = static_cast<double>(events.size());
}
BENCHMARK(BM_FitMle)->Arg(2'000)->Arg(20'000)->Unit(benchmark::kMillisecond);

void BM_LimitParams(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    Eigen::MatrixXd P = Eigen::MatrixXd::Random(n, n).cwiseAbs().array() + 0.1;
    for (Eigen::Index i = 0; i < n; ++i) P.row(i) /= P.row(i).sum();
    const gchp::TransitionMatrix T(P);
    std::vector<double> values;
    for (Eigen::Index i = 0; i < n; ++i) values.push_back(i < n / 2 ? 0.01 * static_cast<double>(n / 2 - i) : -0.01 * static_cast<double>(i - n / 2 + 1));
    for (auto _ : state) {
        const auto pi = gchp::stationary_distribution(T);
        benchmark::DoNotOptimize(gchp::compute_limit_params(values, T, pi, kParams).sigma_sq);
    }
}
BENCHMARK(BM_LimitParams)->Arg(2)->Arg(8)->Arg(32);

void BM_SelectModel(benchmark::State& state) {
    const auto session = gchp::simulate_gchp(generator(), static_cast<double>(state.range(0)), 3);
    const auto kinds = gchp::all_model_kinds();
    for (auto _ : state) benchmark::DoNotOptimize(gchp::select_model(session.mid, session.moves, kinds).chosen);
    state.counters["events"] = static_cast<double>(session.moves.size());
}
BENCHMARK(BM_SelectModel)->Arg(10'800)->Unit(benchmark::kMillisecond);

void BM_MonteCarloPredict(benchmark::State& state) {
    const auto session = gchp::simulate_gchp(generator(), 10'800.0, 4);
    const auto model = gchp::fit_gchp(session.mid, session.moves, gchp::ModelKind::TwoSDO);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            gchp::predict_monte_carlo(model, 100.0, 0, 7200.0, static_cast<std::size_t>(state.range(0)), ++seed).mean);
    }
}
BENCHMARK(BM_MonteCarloPredict)->Arg(250)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
