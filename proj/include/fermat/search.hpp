#pragma once

// Exhaustive candidate sweeps. The candidate space is partitioned by z
// across worker threads; filters and the oracle are pure, so the only shared
// state is the certificate sink (appends serialized unless the sink opts
// into concurrent use). Aggregation is a fold over per-worker tallies, so a
// report is bit-identical for any worker count.

#include <fermat/arith.hpp>
#include <fermat/filters.hpp>
#include <fermat/serialize.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace fermat {

struct SearchConfig {
    Natural x_max{1};
    Natural y_max{1};
    Natural z_max{1};
    Natural z_min{1}; // shard runs restrict the z range; full runs leave it at 1
    std::vector<Natural> p_set;
    PipelineConfig pipeline = default_pipeline();
    bool coprime_only = false;
    bool canonical_xy = true; // enumerate x <= y only; the equation is symmetric
    bool allow_generalized = false; // permit p outside the odd primes (p >= 1)
    unsigned worker_count = 1;
};

// Everything that defines the search space (not how it is executed):
// worker_count is deliberately excluded.
inline bool same_search_space(const SearchConfig& a, const SearchConfig& b) {
    return a.x_max == b.x_max && a.y_max == b.y_max && a.p_set == b.p_set &&
           a.pipeline == b.pipeline && a.coprime_only == b.coprime_only &&
           a.canonical_xy == b.canonical_xy && a.allow_generalized == b.allow_generalized;
}

inline void validate_config(const SearchConfig& cfg) {
    if (cfg.x_max < 1 || cfg.y_max < 1 || cfg.z_max < 1)
        throw std::invalid_argument("search config: ranges must be >= 1");
    if (cfg.z_min < 1 || cfg.z_min > cfg.z_max)
        throw std::invalid_argument("search config: need 1 <= z_min <= z_max");
    if (cfg.z_max - cfg.z_min + 1 > (Natural(1) << 62))
        throw std::invalid_argument("search config: z range too large to shard");
    if (cfg.p_set.empty()) throw std::invalid_argument("search config: p_set must not be empty");
    for (const Natural& p : cfg.p_set) {
        if (p < 1) throw std::invalid_argument("search config: exponents must be >= 1");
        if (!cfg.allow_generalized && (p < 3 || !is_prime(p)))
            throw std::invalid_argument(
                "search config: exponent " + p.str() +
                " is not an odd prime (generalized mode not enabled)");
    }
    if (cfg.worker_count < 1)
        throw std::invalid_argument("search config: worker_count must be >= 1");
    validate_pipeline(cfg.pipeline);
}

struct SearchReport {
    std::uint64_t total_candidates = 0;
    std::map<FilterId, std::uint64_t> refuted_by_filter; // one entry per pipeline filter
    std::uint64_t survivors_to_oracle = 0;
    std::uint64_t oracle_solutions_found = 0;
    double wall_time_seconds = 0.0; // measured; excluded from the canonical document
    bool partial = false;           // set when a sink failure aborted the run
    SearchConfig config_echo;
};

// ---------------------------------------------------------------------------
// Oracle

// Exact test of x^p + y^p = z^p. A bit-length comparison rules out most
// mismatches before any full power is materialized.
inline bool oracle_check(const Natural& x, const Natural& y, const Natural& z,
                         const Natural& p) {
    if (x < 1 || y < 1 || z < 1 || p < 1)
        throw std::domain_error("oracle_check: arguments must be >= 1");
    using boost::multiprecision::msb;
    Natural bx = msb(x) + 1, by = msb(y) + 1, bz = msb(z) + 1;
    Natural bmax = std::max(bx, by);
    // bits(v^p) lies in [p*(bits(v)-1)+1, p*bits(v)]; the sum adds at most one bit.
    Natural sum_lo = p * (bmax - 1) + 1, sum_hi = p * bmax + 1;
    Natural z_lo = p * (bz - 1) + 1, z_hi = p * bz;
    if (sum_hi < z_lo || z_hi < sum_lo) return false;
    return pow(x, p) + pow(y, p) == pow(z, p);
}

// ---------------------------------------------------------------------------
// Enumeration

// Visits every (x, y, z, p) of the configured space in deterministic order:
// z ascending, then x, then y, then p in p_set order.
template <typename Fn>
void for_each_candidate(const SearchConfig& cfg, Fn&& fn) {
    validate_config(cfg);
    for (Natural z = cfg.z_min; z <= cfg.z_max; ++z)
        for (Natural x = 1; x <= cfg.x_max; ++x) {
            if (cfg.canonical_xy && x > cfg.y_max) break;
            for (Natural y = cfg.canonical_xy ? x : Natural(1); y <= cfg.y_max; ++y) {
                if (cfg.coprime_only && boost::multiprecision::gcd(x, y) != 1) continue;
                for (const Natural& p : cfg.p_set) fn(x, y, z, p);
            }
        }
}

// Candidate count as a pure function of the config.
inline std::uint64_t count_candidates(const SearchConfig& cfg) {
    validate_config(cfg);
    Natural pairs = 0;
    if (cfg.coprime_only) {
        for (Natural x = 1; x <= cfg.x_max; ++x) {
            if (cfg.canonical_xy && x > cfg.y_max) break;
            for (Natural y = cfg.canonical_xy ? x : Natural(1); y <= cfg.y_max; ++y)
                if (boost::multiprecision::gcd(x, y) == 1) ++pairs;
        }
    } else if (cfg.canonical_xy) {
        Natural m = std::min(cfg.x_max, cfg.y_max);
        pairs = m * cfg.y_max - m * (m - 1) / 2;
    } else {
        pairs = cfg.x_max * cfg.y_max;
    }
    Natural total = pairs * (cfg.z_max - cfg.z_min + 1) * cfg.p_set.size();
    if (total > std::numeric_limits<std::uint64_t>::max())
        throw std::overflow_error("count_candidates: count exceeds 64 bits");
    return total.convert_to<std::uint64_t>();
}

// ---------------------------------------------------------------------------
// Certificate sinks

class RefutationSink {
  public:
    virtual ~RefutationSink() = default;
    virtual void append(const Refutation& r) = 0;
    virtual void flush() {}
    // Sinks returning true accept concurrent append() calls; for all others
    // the search serializes appends.
    virtual bool thread_safe() const { return false; }
};

// Append-only stream of JSON records, one per line.
class JsonLinesSink : public RefutationSink {
  public:
    explicit JsonLinesSink(const std::string& path) : out_(path, std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open certificate stream: " + path);
    }
    void append(const Refutation& r) override {
        out_ << to_json_line(r) << '\n';
        if (!out_) throw std::runtime_error("certificate stream write failed");
    }
    void flush() override {
        out_.flush();
        if (!out_) throw std::runtime_error("certificate stream flush failed");
    }

  private:
    std::ofstream out_;
};

namespace detail {

inline std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t hash_natural(std::uint64_t h, const Natural& n) {
    if (n == 0) return fnv1a(h, 0);
    if (boost::multiprecision::msb(n) < 64) return fnv1a(h, n.convert_to<std::uint64_t>());
    for (char ch : n.str()) h = fnv1a(h, static_cast<std::uint64_t>(ch));
    return h;
}

inline std::uint64_t hash_refutation(const Refutation& r) {
    std::uint64_t h = 1469598103934665603ULL;
    h = hash_natural(h, r.candidate.x);
    h = hash_natural(h, r.candidate.y);
    h = hash_natural(h, r.candidate.z);
    h = hash_natural(h, r.candidate.p.value());
    h = fnv1a(h, static_cast<std::uint64_t>(r.certificate.filter_id));
    h = fnv1a(h, r.certificate.external_assumption ? 1 : 0);
    const Witness& w = r.certificate.witness;
    if (auto* b = std::get_if<BoundsWitness>(&w)) {
        h = fnv1a(h, static_cast<std::uint64_t>(b->violated));
    } else if (auto* t2 = std::get_if<T2Witness>(&w)) {
        h = hash_natural(h, t2->d);
        h = fnv1a(h, t2->swapped ? 1 : 0);
    } else if (auto* t3 = std::get_if<T3Witness>(&w)) {
        h = fnv1a(h, static_cast<std::uint64_t>(t3->clause));
        h = hash_natural(h, t3->a);
        h = hash_natural(h, t3->b);
    } else if (auto* t4 = std::get_if<T4Witness>(&w)) {
        h = hash_natural(h, t4->z);
    } else if (auto* t5 = std::get_if<T5Witness>(&w)) {
        h = hash_natural(h, t5->g);
        h = hash_natural(h, t5->s);
        h = hash_natural(h, t5->lower);
        h = hash_natural(h, t5->upper);
        h = fnv1a(h, t5->r ? 1 : 0);
        if (t5->r) h = hash_natural(h, *t5->r);
    } else if (auto* t6 = std::get_if<T6Witness>(&w)) {
        h = fnv1a(h, static_cast<std::uint64_t>(t6->side));
    } else if (auto* m = std::get_if<ModularWitness>(&w)) {
        h = hash_natural(h, m->m);
        h = hash_natural(h, m->lhs);
        h = hash_natural(h, m->rhs);
    } else if (auto* e = std::get_if<ExternalWitness>(&w)) {
        h = hash_natural(h, e->gcd_xy);
    }
    return h;
}

} // namespace detail

// Order-independent fingerprint of a certificate multiset: two streams have
// equal digests iff (up to hash collision) they contain the same records the
// same number of times, in any order.
struct MultisetDigest {
    std::uint64_t count = 0;
    std::uint64_t sum = 0;
    std::uint64_t xor_mix = 0;

    friend bool operator==(const MultisetDigest&, const MultisetDigest&) = default;
};

class DigestSink : public RefutationSink {
  public:
    void append(const Refutation& r) override {
        std::uint64_t h = detail::hash_refutation(r);
        count_.fetch_add(1, std::memory_order_relaxed);
        sum_.fetch_add(h, std::memory_order_relaxed);
        xor_.fetch_xor(h, std::memory_order_relaxed);
    }
    bool thread_safe() const override { return true; }
    MultisetDigest digest() const {
        return MultisetDigest{count_.load(), sum_.load(), xor_.load()};
    }

  private:
    std::atomic<std::uint64_t> count_{0};
    std::atomic<std::uint64_t> sum_{0};
    std::atomic<std::uint64_t> xor_{0};
};

// ---------------------------------------------------------------------------
// Sweep

namespace detail {

struct Tally {
    std::uint64_t total = 0;
    std::uint64_t survivors = 0;
    std::uint64_t solutions = 0;
    std::array<std::uint64_t, 8> by_filter{}; // indexed by FilterId

    void merge(const Tally& o) {
        total += o.total;
        survivors += o.survivors;
        solutions += o.solutions;
        for (std::size_t i = 0; i < by_filter.size(); ++i) by_filter[i] += o.by_filter[i];
    }
};

struct ExponentEntry {
    Natural value;
    std::optional<OddPrime> prime; // engaged iff the filters apply
};

} // namespace detail

inline SearchReport run_search(const SearchConfig& cfg, RefutationSink* sink = nullptr) {
    validate_config(cfg);
    auto t0 = std::chrono::steady_clock::now();

    std::vector<detail::ExponentEntry> exponents;
    exponents.reserve(cfg.p_set.size());
    for (const Natural& p : cfg.p_set) {
        std::optional<OddPrime> prime;
        if (p >= 3 && is_prime(p)) prime = OddPrime::unchecked(p);
        exponents.push_back({p, std::move(prime)});
    }

    const std::uint64_t shard_count = Natural(cfg.z_max - cfg.z_min + 1).convert_to<std::uint64_t>();
    const unsigned workers = static_cast<unsigned>(
        std::min<std::uint64_t>(cfg.worker_count, shard_count));

    std::atomic<std::uint64_t> next_shard{0};
    std::atomic<bool> abort{false};
    std::mutex sink_mutex;
    std::mutex error_mutex;
    bool sink_failed = false;
    std::exception_ptr worker_error;

    std::vector<detail::Tally> tallies(workers);

    auto drain_batch = [&](std::vector<Refutation>& batch) {
        if (!sink || batch.empty()) {
            batch.clear();
            return;
        }
        try {
            if (sink->thread_safe()) {
                for (const Refutation& r : batch) sink->append(r);
            } else {
                std::lock_guard<std::mutex> lock(sink_mutex);
                for (const Refutation& r : batch) sink->append(r);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            sink_failed = true;
            abort.store(true, std::memory_order_relaxed);
        }
        batch.clear();
    };

    auto work = [&](unsigned index) {
        detail::Tally tally;
        std::vector<Refutation> batch;
        batch.reserve(sink ? 512 : 0);
        try {
            for (;;) {
                if (abort.load(std::memory_order_relaxed)) break;
                std::uint64_t shard = next_shard.fetch_add(1, std::memory_order_relaxed);
                if (shard >= shard_count) break;
                Natural z = cfg.z_min + shard;
                for (Natural x = 1; x <= cfg.x_max; ++x) {
                    if (cfg.canonical_xy && x > cfg.y_max) break;
                    if (abort.load(std::memory_order_relaxed)) break;
                    for (Natural y = cfg.canonical_xy ? x : Natural(1); y <= cfg.y_max; ++y) {
                        if (cfg.coprime_only && boost::multiprecision::gcd(x, y) != 1) continue;
                        for (const detail::ExponentEntry& pe : exponents) {
                            ++tally.total;
                            if (pe.prime) {
                                Candidate c(x, y, z, *pe.prime);
                                Verdict v = detail::evaluate_unchecked(c, cfg.pipeline);
                                if (v.refuted()) {
                                    ++tally.by_filter[static_cast<std::size_t>(
                                        v.certificate->filter_id)];
                                    if (sink) {
                                        batch.push_back(Refutation{std::move(c),
                                                                   std::move(*v.certificate)});
                                        if (batch.size() >= 512) drain_batch(batch);
                                    }
                                } else {
                                    ++tally.survivors;
                                    if (oracle_check(x, y, z, pe.value)) ++tally.solutions;
                                }
                            } else {
                                // Generalized exponent: the filter criteria
                                // are stated for odd primes only, so the
                                // candidate goes straight to the oracle.
                                ++tally.survivors;
                                if (oracle_check(x, y, z, pe.value)) ++tally.solutions;
                            }
                        }
                    }
                }
                drain_batch(batch);
            }
            drain_batch(batch);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!worker_error) worker_error = std::current_exception();
            abort.store(true, std::memory_order_relaxed);
        }
        tallies[index] = tally;
    };

    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) threads.emplace_back(work, i);
        for (auto& t : threads) t.join();
    }

    if (worker_error) std::rethrow_exception(worker_error);
    if (sink && !sink_failed) {
        try {
            sink->flush();
        } catch (...) {
            sink_failed = true;
        }
    }

    detail::Tally total;
    for (const detail::Tally& t : tallies) total.merge(t);

    SearchReport report;
    report.total_candidates = total.total;
    report.survivors_to_oracle = total.survivors;
    report.oracle_solutions_found = total.solutions;
    for (FilterId f : cfg.pipeline.filters)
        report.refuted_by_filter[f] = total.by_filter[static_cast<std::size_t>(f)];
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.partial = sink_failed;
    report.config_echo = cfg;
    return report;
}

// Fieldwise sum of shard reports; commutative and associative. Requires the
// same search space (z ranges and worker counts may differ).
inline SearchReport merge_reports(const SearchReport& a, const SearchReport& b) {
    if (!same_search_space(a.config_echo, b.config_echo))
        throw std::invalid_argument("merge_reports: reports describe different search spaces");
    SearchReport m = a;
    m.total_candidates += b.total_candidates;
    m.survivors_to_oracle += b.survivors_to_oracle;
    m.oracle_solutions_found += b.oracle_solutions_found;
    for (const auto& [id, n] : b.refuted_by_filter) m.refuted_by_filter[id] += n;
    m.wall_time_seconds = std::max(a.wall_time_seconds, b.wall_time_seconds);
    m.partial = a.partial || b.partial;
    m.config_echo.z_min = std::min(a.config_echo.z_min, b.config_echo.z_min);
    m.config_echo.z_max = std::max(a.config_echo.z_max, b.config_echo.z_max);
    return m;
}

// ---------------------------------------------------------------------------
// Report documents

inline json config_to_json(const SearchConfig& cfg) {
    json moduli = json::array();
    for (const Natural& m : cfg.pipeline.moduli) moduli.push_back(to_json(m));
    json p_set = json::array();
    for (const Natural& p : cfg.p_set) p_set.push_back(to_json(p));
    json pipeline = json::array();
    for (FilterId f : cfg.pipeline.filters) pipeline.push_back(std::string(to_string(f)));
    return json{{"allow_external", cfg.pipeline.allow_external},
                {"allow_generalized", cfg.allow_generalized},
                {"canonical_xy", cfg.canonical_xy},
                {"coprime_only", cfg.coprime_only},
                {"moduli", moduli},
                {"p_set", p_set},
                {"pipeline", pipeline},
                {"x_max", to_json(cfg.x_max)},
                {"y_max", to_json(cfg.y_max)},
                {"z_max", to_json(cfg.z_max)},
                {"z_min", to_json(cfg.z_min)}};
}

inline SearchConfig config_from_json(const json& j) {
    SearchConfig cfg;
    cfg.x_max = natural_from_json(j.at("x_max"));
    cfg.y_max = natural_from_json(j.at("y_max"));
    cfg.z_max = natural_from_json(j.at("z_max"));
    cfg.z_min = natural_from_json(j.at("z_min"));
    cfg.coprime_only = j.at("coprime_only").get<bool>();
    cfg.canonical_xy = j.at("canonical_xy").get<bool>();
    cfg.allow_generalized = j.at("allow_generalized").get<bool>();
    cfg.pipeline.allow_external = j.at("allow_external").get<bool>();
    cfg.p_set.clear();
    for (const json& p : j.at("p_set")) cfg.p_set.push_back(natural_from_json(p));
    cfg.pipeline.moduli.clear();
    for (const json& m : j.at("moduli")) cfg.pipeline.moduli.push_back(natural_from_json(m));
    cfg.pipeline.filters.clear();
    for (const json& f : j.at("pipeline")) {
        auto id = parse_filter_id(f.get<std::string>());
        if (!id) throw std::invalid_argument("unknown filter id in config document");
        cfg.pipeline.filters.push_back(*id);
    }
    return cfg;
}

// Canonical report document. Deliberately contains no timing and no worker
// count: the same sweep yields byte-identical documents however it was
// scheduled.
inline json report_to_json(const SearchReport& r) {
    json by_filter = json::object();
    for (const auto& [id, n] : r.refuted_by_filter) by_filter[std::string(to_string(id))] = n;
    return json{{"config", config_to_json(r.config_echo)},
                {"oracle_solutions_found", r.oracle_solutions_found},
                {"partial", r.partial},
                {"refuted_by_filter", by_filter},
                {"survivors_to_oracle", r.survivors_to_oracle},
                {"total_candidates", r.total_candidates}};
}

inline std::string report_document(const SearchReport& r) { return report_to_json(r).dump(2) + "\n"; }

// Flat tabular export: one row per filter, in pipeline order.
inline std::string report_csv(const SearchReport& r) {
    std::string out = "filter_id,count\n";
    for (FilterId f : r.config_echo.pipeline.filters) {
        auto it = r.refuted_by_filter.find(f);
        std::uint64_t n = it == r.refuted_by_filter.end() ? 0 : it->second;
        out += std::string(to_string(f)) + "," + std::to_string(n) + "\n";
    }
    return out;
}

} // namespace fermat
