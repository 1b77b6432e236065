#pragma once

// Experiment drivers behind the command-line tool. Each command validates its
// configuration, fans replicas out to a worker pool, and writes its artifacts
// from the calling thread once every replica has reported.

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ensembles.hpp"
#include "error.hpp"
#include "limit_law.hpp"
#include "rng.hpp"
#include "spectra.hpp"
#include "stats.hpp"
#include "torus.hpp"
#include "weights.hpp"

namespace sfplap {

inline constexpr const char* artifact_name = "sfplap";
inline constexpr const char* artifact_version = "1.0.0";

/// Thrown for configurations rejected before any computation (exit code 2).
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    std::string command;
    std::size_t n = 0;
    double alpha = 0.5;
    std::optional<double> tau;
    std::optional<double> m;
    bool degenerate_weights = false;
    std::string kind = "BernoulliCentred";
    std::optional<std::string> kind2;
    std::size_t replicas = 1;
    std::uint64_t seed = 0;
    std::size_t bins = 50;
    std::string out = ".";
    std::vector<int> orders;
    bool no_timestamp = false;
    std::vector<std::size_t> sizes;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["n"] = n;
        j["alpha"] = alpha;
        j["tau"] = tau ? nlohmann::ordered_json(*tau) : nlohmann::ordered_json(nullptr);
        j["m"] = m ? nlohmann::ordered_json(*m) : nlohmann::ordered_json(nullptr);
        j["degenerate_weights"] = degenerate_weights;
        j["kind"] = kind;
        j["kind2"] = kind2 ? nlohmann::ordered_json(*kind2) : nlohmann::ordered_json(nullptr);
        j["replicas"] = replicas;
        j["seed"] = seed;
        j["bins"] = bins;
        j["out"] = out;
        j["orders"] = orders;
        j["no_timestamp"] = no_timestamp;
        j["sizes"] = sizes;
        return j;
    }

    /// Overlay the keys present in a JSON object (same names as the flags, with
    /// dashes or underscores).
    void merge_json(const nlohmann::json& j) {
        if (!j.is_object()) throw usage_error("config file must hold a JSON object");
        for (const auto& [raw_key, v] : j.items()) {
            std::string key = raw_key;
            std::replace(key.begin(), key.end(), '-', '_');
            try {
                if (key == "n") n = v.get<std::size_t>();
                else if (key == "alpha") alpha = v.get<double>();
                else if (key == "tau") tau = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
                else if (key == "m") m = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
                else if (key == "degenerate_weights") degenerate_weights = v.get<bool>();
                else if (key == "kind") kind = v.get<std::string>();
                else if (key == "kind2") kind2 = v.is_null() ? std::nullopt : std::optional<std::string>(v.get<std::string>());
                else if (key == "replicas") replicas = v.get<std::size_t>();
                else if (key == "seed") seed = v.get<std::uint64_t>();
                else if (key == "bins") bins = v.get<std::size_t>();
                else if (key == "out") out = v.get<std::string>();
                else if (key == "orders") orders = v.get<std::vector<int>>();
                else if (key == "no_timestamp") no_timestamp = v.get<bool>();
                else if (key == "sizes") sizes = v.get<std::vector<std::size_t>>();
                else if (key == "command") continue;
                else throw usage_error("unknown config key: " + raw_key);
            } catch (const nlohmann::json::exception& e) {
                throw usage_error("config key " + raw_key + ": " + e.what());
            }
        }
    }

    static ExperimentConfig from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw usage_error("cannot read config file " + path.string());
        ExperimentConfig c;
        try {
            c.merge_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::parse_error& e) {
            throw usage_error("config file " + path.string() + ": " + e.what());
        }
        return c;
    }

    ParetoParams pareto() const { return ParetoParams{tau.value_or(0.0)}; }
    WeightMode weight_mode() const { return degenerate_weights ? WeightMode::degenerate : WeightMode::pareto; }

    EnsembleKind ensemble(const std::string& name) const {
        const auto tag = parse_ensemble_tag(name);
        if (!tag) throw usage_error("unknown ensemble kind: " + name);
        // an untruncated run of a truncating kind is only implied for W = 1
        if (uses_truncation(*tag) && !m && !degenerate_weights) return EnsembleKind{*tag, std::nullopt, false};
        return make_kind(*tag, m);
    }

    std::vector<int> moment_orders() const {
        if (!orders.empty()) return orders;
        return {1, 2, 3, 4, 5, 6};
    }

    void validate() const {
        auto need_tau = [&] {
            if (!degenerate_weights && !tau) throw usage_error("--tau is required unless --degenerate-weights is set");
        };
        auto check_common = [&] {
            need_tau();
            try {
                if (tau) pareto().validate();
                if (m && !(*m >= 1.0)) throw invalid_parameter("truncation level m must be >= 1");
                if (!(alpha >= 0.0 && alpha < 1.0)) throw invalid_parameter("alpha must lie in [0, 1)");
            } catch (const invalid_parameter& e) {
                throw usage_error(e.what());
            }
            if (replicas == 0) throw usage_error("--replicas must be positive");
            if (bins == 0) throw usage_error("--bins must be positive");
        };
        auto check_kind = [&](const std::string& name) {
            const auto k = ensemble(name);
            try {
                k.validate();
            } catch (const invalid_parameter& e) {
                throw usage_error(e.what());
            }
        };
        if (command == "esd" || command == "compare") {
            check_common();
            if (n < 2) throw usage_error("--n must be at least 2");
            check_kind(kind);
            if (command == "compare") {
                if (!kind2) throw usage_error("compare needs --kind2");
                check_kind(*kind2);
            }
        } else if (command == "decay") {
            check_common();
            if (!kind2) throw usage_error("decay needs --kind2");
            check_kind(kind);
            check_kind(*kind2);
            if (sizes.size() < 4) throw usage_error("decay needs at least four values in --sizes");
            for (std::size_t s : sizes)
                if (s < 2) throw usage_error("every size must be at least 2");
        } else if (command == "limit") {
            need_tau();
            if (tau) try {
                    pareto().validate();
                } catch (const invalid_parameter& e) {
                    throw usage_error(e.what());
                }
            for (int k : moment_orders())
                if (k < 1 || k > static_cast<int>(detail::max_limit_moment_order))
                    throw usage_error("moment orders must lie in 1..10");
        } else if (command != "selftest") {
            throw usage_error("unknown command: " + command);
        }
    }
};

struct RunResult {
    int exit_code = 0;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> messages;
};

namespace detail {

inline std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

inline std::string header_line(const ExperimentConfig& config, const std::string& file) {
    nlohmann::ordered_json h;
    h["artifact"] = artifact_name;
    h["version"] = artifact_version;
    h["file"] = file;
    h["config"] = config.to_json();
    if (!config.no_timestamp) h["wall_clock"] = utc_timestamp();
    return h.dump();
}

/// Writes files under the output directory, each opened with the header line.
class Collector {
public:
    Collector(const ExperimentConfig& config, RunResult& result) : config_(config), result_(result) {
        std::filesystem::create_directories(config.out);
    }

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const std::filesystem::path path = std::filesystem::path(config_.out) / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << header_line(config_, name) << '\n';
        body(out);
        if (!out) throw std::runtime_error("write failed for " + path.string());
        result_.files.push_back(path);
    }

private:
    const ExperimentConfig& config_;
    RunResult& result_;
};

template <typename R>
struct ReplicaOutcome {
    std::size_t replica = 0;
    std::uint64_t seed = 0;
    std::optional<R> value;
    std::string error;
};

/// Run fn(replica, seed) for every replica on a small pool of threads. Results
/// land in replica order, so the output never depends on completion order.
template <typename R, typename F>
std::vector<ReplicaOutcome<R>> run_replicas(std::size_t count, std::uint64_t base_seed, F fn) {
    std::vector<ReplicaOutcome<R>> outcomes(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < count; r = next++) {
            auto& o = outcomes[r];
            o.replica = r;
            o.seed = rng::replica_seed(base_seed, r);
            try {
                o.value = fn(r, o.seed);
            } catch (const std::exception& e) {
                o.error = e.what();
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return outcomes;
}

template <typename R>
nlohmann::ordered_json seed_table(const std::vector<ReplicaOutcome<R>>& outcomes) {
    auto table = nlohmann::ordered_json::array();
    for (const auto& o : outcomes) {
        nlohmann::ordered_json row;
        row["replica"] = o.replica;
        row["seed"] = o.seed;
        row["status"] = o.value ? "ok" : "failed";
        if (!o.value) row["error"] = o.error;
        table.push_back(row);
    }
    return table;
}

template <typename R>
std::size_t failures(const std::vector<ReplicaOutcome<R>>& outcomes) {
    return static_cast<std::size_t>(
        std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return !o.value.has_value(); }));
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline nlohmann::ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline void write_summary(Collector& collector, const std::string& name, nlohmann::ordered_json summary,
                          const ExperimentConfig& config, std::chrono::steady_clock::time_point t0) {
    if (!config.no_timestamp) summary["runtime_seconds"] = seconds_since(t0);
    collector.write(name, [&](std::ostream& out) { out << summary.dump() << '\n'; });
}

inline SpectralSample pooled(const std::vector<const SpectralSample*>& parts) {
    std::vector<double> all;
    for (const auto* p : parts) all.insert(all.end(), p->eigenvalues.begin(), p->eigenvalues.end());
    return make_sample(std::move(all));
}

inline double scaling_for(const EnsembleKind& kind, const TorusParams& torus) {
    return is_alpha_zero(kind.tag) ? static_cast<double>(torus.n) : scaling_constant(torus);
}

}  // namespace detail

/// Spectra of one ensemble: eigenvalues per replica, pooled histogram, moments.
inline RunResult cmd_esd(ExperimentConfig config) {
    config.command = "esd";
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const EnsembleKind kind = config.ensemble(config.kind);
    const TorusParams torus{config.n, config.alpha};
    const ParetoParams pareto = config.pareto();

    auto outcomes = detail::run_replicas<SpectralSample>(config.replicas, config.seed, [&](std::size_t, std::uint64_t seed) {
        const NoiseBundle bundle = make_noise_bundle(torus.n, seed);
        SpectralSample s = eigenvalues_symmetric(build_ensemble(kind, torus, pareto, bundle, config.weight_mode()));
        s.source_kind = kind;
        s.seed = seed;
        return s;
    });

    RunResult result;
    detail::Collector collector(config, result);
    std::vector<const SpectralSample*> ok;
    auto moments = nlohmann::ordered_json::array();
    for (const auto& o : outcomes) {
        if (!o.value) {
            result.messages.push_back("replica " + std::to_string(o.replica) + " failed: " + o.error);
            continue;
        }
        ok.push_back(&*o.value);
        collector.write("esd_eigenvalues_r" + std::to_string(o.replica) + ".csv",
                        [&](std::ostream& out) { write_eigenvalues_csv(out, *o.value); });
        nlohmann::ordered_json row;
        row["replica"] = o.replica;
        for (int k = 1; k <= 6; ++k) row["M" + std::to_string(k)] = esd_moment(*o.value, k);
        moments.push_back(row);
    }
    if (!ok.empty()) {
        const Histogram h = histogram(detail::pooled(ok), config.bins);
        collector.write("esd_histogram.csv", [&](std::ostream& out) { write_histogram_csv(out, h); });
    }

    nlohmann::ordered_json summary;
    summary["kind"] = kind.label();
    summary["c_N"] = detail::scaling_for(kind, torus);
    summary["replicas_ok"] = ok.size();
    summary["moments"] = moments;
    summary["seeds"] = detail::seed_table(outcomes);
    detail::write_summary(collector, "esd_summary.jsonl", summary, config, t0);
    result.exit_code = detail::failures(outcomes) == 0 ? 0 : 1;
    return result;
}

struct CompareReplica {
    SpectralSample first;
    SpectralSample second;
    double kolmogorov = 0.0;
    double levy = 0.0;
    double hw = 0.0;
};

/// Two ensembles on the same noise bundle: distances, overlaid histograms and
/// trace-moment differences.
inline RunResult cmd_compare(ExperimentConfig config) {
    config.command = "compare";
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const EnsembleKind first = config.ensemble(config.kind);
    const EnsembleKind second = config.ensemble(*config.kind2);
    const TorusParams torus{config.n, config.alpha};
    const ParetoParams pareto = config.pareto();

    auto outcomes = detail::run_replicas<CompareReplica>(config.replicas, config.seed, [&](std::size_t, std::uint64_t seed) {
        const NoiseBundle bundle = make_noise_bundle(torus.n, seed);
        const SymmetricMatrix a = build_ensemble(first, torus, pareto, bundle, config.weight_mode());
        const SymmetricMatrix b = build_ensemble(second, torus, pareto, bundle, config.weight_mode());
        CompareReplica c;
        c.hw = hw_trace_distance(a, b);
        c.first = eigenvalues_symmetric(a);
        c.second = eigenvalues_symmetric(b);
        c.kolmogorov = kolmogorov_distance(c.first, c.second);
        c.levy = levy_distance(c.first, c.second);
        return c;
    });

    RunResult result;
    detail::Collector collector(config, result);
    std::vector<const SpectralSample*> firsts, seconds;
    double ks_sum = 0.0, levy_sum = 0.0, hw_sum = 0.0;
    collector.write("compare_distances.csv", [&](std::ostream& out) {
        out << "replica,seed,kolmogorov,levy,hw_trace_distance\n";
        for (const auto& o : outcomes) {
            if (!o.value) {
                result.messages.push_back("replica " + std::to_string(o.replica) + " failed: " + o.error);
                continue;
            }
            const auto& c = *o.value;
            out << o.replica << ',' << o.seed << ',' << format_double(c.kolmogorov) << ',' << format_double(c.levy)
                << ',' << format_double(c.hw) << '\n';
            firsts.push_back(&c.first);
            seconds.push_back(&c.second);
            ks_sum += c.kolmogorov;
            levy_sum += c.levy;
            hw_sum += c.hw;
        }
    });

    const double k_ok = static_cast<double>(firsts.size());
    if (!firsts.empty()) {
        const SpectralSample pa = detail::pooled(firsts);
        const SpectralSample pb = detail::pooled(seconds);
        const double lo = std::min(pa.eigenvalues.front(), pb.eigenvalues.front());
        const double hi = std::max(pa.eigenvalues.back(), pb.eigenvalues.back());
        const Histogram ha = histogram(pa, config.bins, std::pair{lo, hi});
        const Histogram hb = histogram(pb, config.bins, std::pair{lo, hi});
        collector.write("compare_histogram_first.csv", [&](std::ostream& out) { write_histogram_csv(out, ha); });
        collector.write("compare_histogram_second.csv", [&](std::ostream& out) { write_histogram_csv(out, hb); });
        collector.write("compare_moments.csv", [&](std::ostream& out) {
            out << "k,first,second,difference\n";
            for (int k = 1; k <= 4; ++k) {
                double ma = 0.0, mb = 0.0;
                for (std::size_t i = 0; i < firsts.size(); ++i) {
                    ma += esd_moment(*firsts[i], k) / k_ok;
                    mb += esd_moment(*seconds[i], k) / k_ok;
                }
                out << k << ',' << format_double(ma) << ',' << format_double(mb) << ',' << format_double(ma - mb) << '\n';
            }
        });
    }

    nlohmann::ordered_json summary;
    summary["first"] = first.label();
    summary["second"] = second.label();
    summary["replicas_ok"] = firsts.size();
    summary["mean_kolmogorov"] = firsts.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(ks_sum / k_ok);
    summary["mean_levy"] = firsts.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(levy_sum / k_ok);
    summary["mean_hw_trace_distance"] = firsts.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(hw_sum / k_ok);
    summary["seeds"] = detail::seed_table(outcomes);
    detail::write_summary(collector, "compare_summary.jsonl", summary, config, t0);
    result.exit_code = detail::failures(outcomes) == 0 ? 0 : 1;
    return result;
}

/// Grid used for the density of the degenerate limit.
inline StieltjesGrid default_density_grid() { return StieltjesGrid::uniform(-6.0, 6.0, 1201, 1e-2); }

/// Limit moments, and for degenerate weights the free-convolution density.
inline RunResult cmd_limit(ExperimentConfig config) {
    config.command = "limit";
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const LimitLawParams law{config.pareto(), config.m, config.degenerate_weights};

    RunResult result;
    detail::Collector collector(config, result);
    std::map<int, double> moments;
    for (int k : config.moment_orders()) moments[k] = limit_moment(static_cast<std::size_t>(k), law);
    collector.write("limit_moments.csv", [&](std::ostream& out) {
        out << "k,M_k\n";
        for (auto [k, v] : moments) out << k << ',' << format_double(v) << '\n';
    });

    nlohmann::ordered_json summary;
    std::vector<double> even;
    for (int k = 2; moments.count(k); k += 2) even.push_back(moments[k]);
    summary["carleman"] = carleman_diagnostic(even);

    if (config.degenerate_weights) {
        const auto pts = semicircle_free_conv_density(default_density_grid());
        collector.write("limit_density.csv", [&](std::ostream& out) {
            out << "E,rho\n";
            for (const auto& p : pts) out << format_double(p.energy) << ',' << format_double(p.density) << '\n';
        });
        std::size_t unconverged = 0, max_iter = 0;
        for (const auto& p : pts) {
            unconverged += !p.converged;
            max_iter = std::max(max_iter, p.iterations);
        }
        summary["density_mass"] = density_moment(pts, 0);
        summary["density_second_moment"] = density_moment(pts, 2);
        summary["max_iterations"] = max_iter;
        summary["unconverged_points"] = unconverged;
        if (unconverged > 0) {
            result.messages.push_back(std::to_string(unconverged) + " density grid points did not converge");
            result.exit_code = 1;
        }
    }
    detail::write_summary(collector, "limit_summary.jsonl", summary, config, t0);
    return result;
}

/// Mean hw_trace_distance of a kind pair over a sweep of sizes, with slope fits.
inline RunResult cmd_decay(ExperimentConfig config) {
    config.command = "decay";
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const EnsembleKind first = config.ensemble(config.kind);
    const EnsembleKind second = config.ensemble(*config.kind2);
    const ParetoParams pareto = config.pareto();

    RunResult result;
    std::vector<DecayPoint> curve;
    auto seeds = nlohmann::ordered_json::array();
    std::size_t failed = 0;
    for (std::size_t n : config.sizes) {
        const TorusParams torus{n, config.alpha};
        auto outcomes = detail::run_replicas<double>(config.replicas, config.seed, [&](std::size_t, std::uint64_t seed) {
            const NoiseBundle bundle = make_noise_bundle(n, seed);
            return hw_trace_distance(build_ensemble(first, torus, pareto, bundle, config.weight_mode()),
                                     build_ensemble(second, torus, pareto, bundle, config.weight_mode()));
        });
        DecayPoint p;
        p.x = static_cast<double>(n);
        for (const auto& o : outcomes)
            if (o.value) p.values.push_back(*o.value);
            else result.messages.push_back("N=" + std::to_string(n) + " replica " + std::to_string(o.replica) + " failed: " + o.error);
        failed += detail::failures(outcomes);
        if (!p.values.empty()) detail::summarize(p);
        curve.push_back(std::move(p));
        nlohmann::ordered_json row;
        row["n"] = n;
        row["replicas"] = detail::seed_table(outcomes);
        seeds.push_back(row);
    }

    detail::Collector collector(config, result);
    collector.write("decay_curve.csv", [&](std::ostream& out) {
        out << "N,mean_hw,std_error\n";
        for (const auto& p : curve)
            out << static_cast<std::size_t>(p.x) << ',' << format_double(p.mean) << ',' << format_double(p.std_error) << '\n';
    });

    std::vector<double> xs, ys;
    for (const auto& p : curve)
        if (!p.values.empty()) xs.push_back(p.x), ys.push_back(p.mean);
    nlohmann::ordered_json summary;
    summary["first"] = first.label();
    summary["second"] = second.label();
    const auto fit = xs.size() >= 2 ? loglog_fit(xs, ys) : std::nullopt;
    const auto fit_log = xs.size() >= 2 ? loglog_fit_log_corrected(xs, ys) : std::nullopt;
    summary["slope_defined"] = fit.has_value();
    summary["slope"] = fit ? nlohmann::ordered_json(fit->slope) : nlohmann::ordered_json(nullptr);
    summary["slope_std_error"] = fit ? nlohmann::ordered_json(fit->slope_std_error) : nlohmann::ordered_json(nullptr);
    summary["slope_log_corrected"] = fit_log ? nlohmann::ordered_json(fit_log->slope) : nlohmann::ordered_json(nullptr);
    summary["slope_log_corrected_std_error"] =
        fit_log ? nlohmann::ordered_json(fit_log->slope_std_error) : nlohmann::ordered_json(nullptr);
    if (!fit) result.messages.push_back("slope undefined: some mean distance is not positive");
    summary["seeds"] = seeds;
    detail::write_summary(collector, "decay_summary.jsonl", summary, config, t0);
    result.exit_code = failed == 0 ? 0 : 1;
    return result;
}

namespace detail {

inline std::map<std::string, std::string> snapshot(const std::vector<std::filesystem::path>& files) {
    std::map<std::string, std::string> out;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[f.filename().string()] = s.str();
    }
    return out;
}

}  // namespace detail

/// Toy-scale configurations exercised by selftest.
inline std::vector<ExperimentConfig> selftest_configs(const std::filesystem::path& base) {
    ExperimentConfig c;
    c.n = 200;
    c.alpha = 0.5;
    c.tau = 4.1;
    c.m = 1e3;
    c.replicas = 2;
    c.seed = 20240611;
    c.bins = 40;
    c.no_timestamp = true;

    std::vector<ExperimentConfig> out;
    ExperimentConfig esd = c;
    esd.command = "esd";
    esd.out = (base / "esd").string();
    out.push_back(esd);

    ExperimentConfig cmp = c;
    cmp.command = "compare";
    cmp.kind2 = "GaussianisedCentred";
    cmp.out = (base / "compare").string();
    out.push_back(cmp);

    ExperimentConfig lim = c;
    lim.command = "limit";
    lim.tau.reset();
    lim.m.reset();
    lim.degenerate_weights = true;
    lim.out = (base / "limit").string();
    out.push_back(lim);

    ExperimentConfig dec = c;
    dec.command = "decay";
    dec.kind = "GaussianisedCentred";
    dec.kind2 = "SimplifiedSqrtP";
    dec.sizes = {50, 100, 150, 200};
    dec.out = (base / "decay").string();
    out.push_back(dec);
    return out;
}

inline RunResult dispatch(const ExperimentConfig& config);

/// Run every command twice at toy scale and require byte-identical outputs.
inline RunResult cmd_selftest(ExperimentConfig config) {
    config.command = "selftest";
    const std::filesystem::path base = std::filesystem::path(config.out) / "selftest";
    RunResult result;
    for (const auto& c : selftest_configs(base)) {
        const RunResult first = dispatch(c);
        const auto a = detail::snapshot(first.files);
        std::filesystem::remove_all(c.out);
        const RunResult second = dispatch(c);
        const auto b = detail::snapshot(second.files);
        const bool same = first.exit_code == 0 && second.exit_code == 0 && !a.empty() && a == b;
        result.messages.push_back("selftest " + c.command + ": " + (same ? "identical" : "MISMATCH") + " (" +
                                  std::to_string(a.size()) + " files)");
        if (!same) result.exit_code = 1;
        result.files.insert(result.files.end(), second.files.begin(), second.files.end());
    }
    return result;
}

inline RunResult dispatch(const ExperimentConfig& config) {
    if (config.command == "esd") return cmd_esd(config);
    if (config.command == "compare") return cmd_compare(config);
    if (config.command == "limit") return cmd_limit(config);
    if (config.command == "decay") return cmd_decay(config);
    if (config.command == "selftest") return cmd_selftest(config);
    throw usage_error("unknown command: " + config.command);
}

}  // namespace sfplap
