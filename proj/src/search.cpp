#include "rm/search.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <unistd.h>
#include <cstring>

#include "httplib.h"
#include "json.hpp"
#include "rm/error.hpp"
#include "rm/field.hpp"

namespace rm {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

IntRange range_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw Error(RM_ERR_INVALID_ARGUMENT, "range must be [lo, hi]: " + j.dump());
    return {j[0].get<long>(), j[1].get<long>()};
}

std::vector<IntRange> ranges_from_json(const json& j) {
    if (!j.is_array()) throw Error(RM_ERR_INVALID_ARGUMENT, "expected a list of ranges");
    std::vector<IntRange> out;
    for (const auto& r : j) out.push_back(range_from_json(r));
    return out;
}

json range_json(const IntRange& r) { return json::array({r.lo, r.hi}); }

json ranges_json(const std::vector<IntRange>& rs) {
    json j = json::array();
    for (const auto& r : rs) j.push_back(range_json(r));
    return j;
}

IntPolynomial dense_poly(const std::vector<long>& coeffs) {
    std::vector<BigInt> c;
    for (long v : coeffs) c.emplace_back(v);
    return from_dense(c, "n");
}

}  // namespace

std::vector<IntRange> SearchScheme::ranges() const {
    if (kind == "box") {
        auto out = a;
        out.insert(out.end(), b.begin(), b.end());
        return out;
    }
    if (kind == "sigma") {
        auto out = c;
        out.push_back(B);
        return out;
    }
    if (kind == "zigzag") {
        auto out = r;
        out.insert(out.end(), s.begin(), s.end());
        out.push_back(zc);
        return out;
    }
    throw Error(RM_ERR_INVALID_ARGUMENT, "unknown scheme kind '" + kind + "'");
}

int64_t SearchScheme::total() const {
    auto rs = ranges();
    if (rs.empty()) return 0;
    __int128 t = 1;
    for (const auto& r : rs) {
        t *= r.size();
        if (t > INT64_MAX) throw Error(RM_ERR_INDEX_RANGE, "scheme has more than 2^63 candidates");
    }
    return int64_t(t);
}

Pcf SearchScheme::enumerate(int64_t index) const {
    int64_t n = total();
    if (index < 0 || index >= n)
        throw Error(RM_ERR_INDEX_RANGE, "index " + std::to_string(index) + " outside [0, " + std::to_string(n) + ")");
    auto rs = ranges();
    std::vector<long> v(rs.size());
    for (size_t i = rs.size(); i-- > 0;) {
        int64_t sz = rs[i].size();
        v[i] = rs[i].lo + long(index % sz);
        index /= sz;
    }
    if (kind == "box") {
        std::vector<long> ca(v.begin(), v.begin() + long(a.size()));
        std::vector<long> cb(v.begin() + long(a.size()), v.end());
        return Pcf(dense_poly(ca), dense_poly(cb));
    }
    nlohmann::json p;
    if (kind == "sigma") {
        p["d"] = d;
        p["c"] = std::vector<long>(v.begin(), v.begin() + long(c.size()));
        p["B"] = v.back();
        return make_family_pcf("sigma", p.dump());
    }
    p["r"] = std::vector<long>(v.begin(), v.begin() + long(r.size()));
    p["s"] = std::vector<long>(v.begin() + long(r.size()), v.begin() + long(r.size() + s.size()));
    p["c"] = v.back();
    return make_family_pcf("zigzag", p.dump());
}

std::string SearchScheme::json() const {
    nlohmann::json j;
    j["id"] = id;
    j["kind"] = kind;
    j["fr_depth"] = fr_depth;
    if (kind == "box") {
        j["a"] = ranges_json(a);
        j["b"] = ranges_json(b);
    } else if (kind == "sigma") {
        j["d"] = d;
        j["c"] = ranges_json(c);
        j["B"] = range_json(B);
    } else {
        j["r"] = ranges_json(r);
        j["s"] = ranges_json(s);
        j["c"] = range_json(zc);
    }
    return j.dump();
}

SearchScheme SearchScheme::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(RM_ERR_INVALID_ARGUMENT, std::string("scheme JSON: ") + e.what());
    }
    SearchScheme s;
    try {
        s.id = j.value("id", std::string("scheme"));
        s.kind = j.at("kind").get<std::string>();
        s.fr_depth = j.value("fr_depth", 512L);
        if (s.kind == "box") {
            s.a = ranges_from_json(j.at("a"));
            s.b = ranges_from_json(j.at("b"));
            if (s.a.empty() || s.b.empty()) throw Error(RM_ERR_INVALID_ARGUMENT, "box needs a and b ranges");
        } else if (s.kind == "sigma") {
            s.d = j.at("d").get<int>();
            s.c = ranges_from_json(j.at("c"));
            s.B = j.contains("B") ? range_from_json(j["B"]) : IntRange{1, 1};
            if (s.d < 1 || s.c.empty() || long(s.c.size()) > s.d / 2 + 1)
                throw Error(RM_ERR_INVALID_ARGUMENT, "sigma needs d >= 1 and 1..d/2+1 coefficient ranges");
        } else if (s.kind == "zigzag") {
            s.r = ranges_from_json(j.at("r"));
            s.s = ranges_from_json(j.at("s"));
            s.zc = j.contains("c") ? range_from_json(j["c"]) : IntRange{1, 1};
            if (s.r.empty() || s.r.size() != s.s.size())
                throw Error(RM_ERR_INVALID_ARGUMENT, "zigzag needs r and s ranges of equal nonzero length");
        } else {
            throw Error(RM_ERR_INVALID_ARGUMENT, "unknown scheme kind '" + s.kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(RM_ERR_INVALID_ARGUMENT, std::string("scheme JSON: ") + e.what());
    }
    if (s.fr_depth < 256) throw Error(RM_ERR_INVALID_ARGUMENT, "fr_depth must be at least 256");
    return s;
}

std::vector<Chunk> chunk_scheme(const SearchScheme& scheme, int64_t chunk_size) {
    if (chunk_size < 1) throw Error(RM_ERR_INVALID_ARGUMENT, "chunk_size must be positive");
    std::vector<Chunk> out;
    int64_t total = scheme.total();
    for (int64_t start = 0, k = 0; start < total; start += chunk_size, ++k)
        out.push_back({scheme.id + "-" + std::to_string(k), scheme.id, start, std::min(chunk_size, total - start)});
    return out;
}

namespace {

std::optional<Hit> test_candidate(const SearchScheme& scheme, int64_t index) {
    try {
        Pcf pcf = scheme.enumerate(index);
        GrowthEstimate g = classify_fr(pcf, scheme.fr_depth);
        if (g.verdict == Verdict::NoReduction) return std::nullopt;
        return Hit{pcf.a().str(), pcf.b().str(), g.ln_s, g.dhat, verdict_name(g.verdict)};
    } catch (const Error&) {
        return std::nullopt;  // degenerate candidates (terminating, all-zero) are not hits
    }
}

std::vector<Hit> run_chunk_impl(const SearchScheme& scheme, int64_t start, int64_t count, int parallelism,
                                const std::atomic<bool>* stop) {
    std::vector<std::optional<Hit>> slots(size_t(std::max<int64_t>(count, 0)));
    std::atomic<int64_t> next{0};
    auto work = [&] {
        for (int64_t i; (i = next.fetch_add(1)) < count;) {
            if (stop && stop->load()) return;
            slots[size_t(i)] = test_candidate(scheme, start + i);
        }
    };
    int threads = std::max(1, std::min<int>(parallelism, int(std::max<int64_t>(count, 1))));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    std::vector<Hit> hits;
    for (auto& h : slots)
        if (h) hits.push_back(*h);
    return hits;
}

json hit_json(const Hit& h) {
    return {{"a", h.a}, {"b", h.b}, {"ln_s", h.ln_s}, {"dhat", h.dhat}, {"verdict", h.verdict}};
}

}  // namespace

std::vector<Hit> run_chunk(const SearchScheme& scheme, int64_t start, int64_t count, int parallelism) {
    return run_chunk_impl(scheme, start, count, parallelism, nullptr);
}

std::string VerifiedFormula::json() const {
    nlohmann::json j = nlohmann::json::parse(pcf.json());
    j["status"] = status;
    j["growth"] = nlohmann::json::parse(growth_json(growth));
    j["relation"] = match ? nlohmann::json::parse(match->json()) : nlohmann::json(nullptr);
    j["validated_at_2x"] = match ? match->validated_at_2x : false;
    j["value"] = value;
    j["value_digits"] = value_digits;
    return j.dump();
}

VerifiedFormula verify_pipeline(const Pcf& pcf, long scheme_depth, const std::vector<std::string>& constants,
                                long match_depth) {
    VerifiedFormula f{pcf, {}, "rejected", std::nullopt, "", 0};
    try {
        f.growth = classify_fr(pcf, 4 * std::max(scheme_depth, 256L));
    } catch (const Error&) {
        return f;
    }
    if (f.growth.verdict != Verdict::FactorialReduction) return f;
    f.status = "unmatched";
    try {
        PrecisionReport r = pcf_limit(pcf, match_depth, 60);
        f.value_digits = r.exact ? 60 : r.digits;
        f.value = r.value.to_string(std::clamp(f.value_digits, 1L, 60L));
    } catch (const Error&) {
    }
    if (!constants.empty()) {
        try {
            f.match = match_pcf(pcf, match_depth, constants, false);
            f.status = "matched";
        } catch (const Error&) {
        }
    }
    return f;
}

CoordinatorConfig CoordinatorConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(RM_ERR_INVALID_ARGUMENT, std::string("config JSON: ") + e.what());
    }
    static const std::set<std::string> known = {"host",     "port",      "chunk_size", "lease_seconds", "store",
                                                "constants", "verify", "match_depth", "schemes"};
    if (!j.is_object()) throw Error(RM_ERR_INVALID_ARGUMENT, "config JSON must be an object");
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw Error(RM_ERR_INVALID_ARGUMENT, "config JSON: unknown key '" + k + "'");
    CoordinatorConfig c;
    try {
        c.host = j.value("host", c.host);
        c.port = j.value("port", 0);
        c.chunk_size = j.value("chunk_size", c.chunk_size);
        if (j.contains("lease_seconds")) {
            c.lease_seconds = j["lease_seconds"].get<long>();
        } else if (const char* env = std::getenv("RM_LEASE_SECONDS")) {
            c.lease_seconds = std::atol(env);
        }
        c.store_dir = j.value("store", c.store_dir);
        c.constants = j.value("constants", std::vector<std::string>{});
        c.verify = j.value("verify", true);
        c.match_depth = j.value("match_depth", c.match_depth);
        for (const auto& s : j.at("schemes")) c.schemes.push_back(SearchScheme::from_json(s.dump()));
    } catch (const nlohmann::json::exception& e) {
        throw Error(RM_ERR_INVALID_ARGUMENT, std::string("config JSON: ") + e.what());
    }
    if (c.schemes.empty()) throw Error(RM_ERR_INVALID_ARGUMENT, "at least one scheme is required");
    if (c.lease_seconds < 1) throw Error(RM_ERR_INVALID_ARGUMENT, "lease_seconds must be positive");
    return c;
}

struct Coordinator::Impl {
    enum class State { Pending, Leased, Done };
    struct ChunkState {
        Chunk chunk;
        State state = State::Pending;
        std::string worker;
        Clock::time_point expiry;
        long hits = 0;
    };
    struct Pending {
        std::string chunk_id;
        Hit hit;
    };
    struct SchemeStats {
        long matched = 0, unmatched = 0, rejected = 0;
    };

    CoordinatorConfig cfg;
    std::map<std::string, const SearchScheme*> schemes;
    std::vector<ChunkState> chunks;
    std::map<std::string, size_t> by_id;
    std::map<std::string, SchemeStats> stats;
    std::deque<Pending> queue;
    long in_flight = 0;
    long duplicates = 0, reissued = 0, rejected_posts = 0;
    std::set<std::string> formula_keys;
    std::map<std::string, long> result_index, formula_index;
    long result_lines = 0, formula_lines = 0, appends_since_index = 0;

    mutable std::mutex mu;
    std::condition_variable cv;
    bool stopping = false;
    httplib::Server server;
    std::thread server_thread, verifier_thread;
    int bound_port = -1;

    std::filesystem::path path(const char* name) const { return std::filesystem::path(cfg.store_dir) / name; }

    bool drained_locked() const {
        for (const auto& c : chunks)
            if (c.state != State::Done) return false;
        return queue.empty() && in_flight == 0;
    }

    void append(const char* file, const std::string& line) {
        std::ofstream out(path(file), std::ios::app);
        out << line << "\n";
        out.flush();
        if (!out) throw Error(RM_ERR_IO, std::string("cannot append to ") + file);
    }

    void write_index_locked() {
        json j;
        j["chunks"] = result_index;
        j["formulas"] = formula_index;
        auto tmp = path("index.json.tmp");
        {
            std::ofstream out(tmp);
            out << j.dump() << "\n";
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path("index.json"), ec);
        appends_since_index = 0;
    }

    void bump_index_locked() {
        if (++appends_since_index >= 16) write_index_locked();
    }

    void load_store() {
        std::filesystem::create_directories(cfg.store_dir);
        std::ifstream fin(path("formulas.jsonl"));
        for (std::string line; std::getline(fin, line);) {
            if (line.empty()) continue;
            try {
                auto j = json::parse(line);
                std::string key = j.at("a").get<std::string>() + "|" + j.at("b").get<std::string>();
                formula_keys.insert(key);
                formula_index[key] = formula_lines;
            } catch (...) {
            }
            ++formula_lines;
        }
        std::ifstream rin(path("results.jsonl"));
        for (std::string line; std::getline(rin, line);) {
            if (line.empty()) continue;
            try {
                auto j = json::parse(line);
                auto it = by_id.find(j.at("chunk_id").get<std::string>());
                if (it != by_id.end() && chunks[it->second].state != State::Done) {
                    chunks[it->second].state = State::Done;
                    result_index[it->first] = result_lines;
                    for (const auto& h : j.at("hits")) {
                        Hit hit{h.at("a"), h.at("b"), h.at("ln_s"), h.at("dhat"), h.at("verdict")};
                        if (!formula_keys.count(hit.a + "|" + hit.b)) queue.push_back({it->first, hit});
                        ++chunks[it->second].hits;
                    }
                }
            } catch (...) {
            }
            ++result_lines;
        }
    }

    static void send_error(httplib::Response& res, int http, rm_status code, const std::string& msg) {
        res.status = http;
        res.set_content(json{{"error", status_name(code)}, {"code", int(code)}, {"message", msg}}.dump(),
                        "application/json");
    }

    void handle_chunk(const httplib::Request& req, httplib::Response& res) {
        std::string worker = req.get_param_value("worker");
        if (worker.empty()) return send_error(res, 400, RM_ERR_INVALID_ARGUMENT, "worker parameter required");
        std::lock_guard<std::mutex> lock(mu);
        auto now = Clock::now();
        ChunkState* pick = nullptr;
        for (auto& c : chunks)
            if (c.state == State::Pending) {
                pick = &c;
                break;
            }
        if (!pick)
            for (auto& c : chunks)
                if (c.state == State::Leased && c.expiry <= now) {
                    pick = &c;
                    ++reissued;
                    break;
                }
        if (!pick) {
            bool all_done = std::all_of(chunks.begin(), chunks.end(), [](const ChunkState& c) { return c.state == State::Done; });
            if (all_done) {
                res.status = 204;
                return;
            }
            auto soonest = Clock::time_point::max();
            for (const auto& c : chunks)
                if (c.state == State::Leased) soonest = std::min(soonest, c.expiry);
            double wait = std::chrono::duration<double>(soonest - now).count();
            res.status = 503;
            res.set_content(json{{"error", "NoChunkAvailable"}, {"retry_after", std::max(0.0, wait)}}.dump(),
                            "application/json");
            return;
        }
        pick->state = State::Leased;
        pick->worker = worker;
        pick->expiry = now + std::chrono::seconds(cfg.lease_seconds);
        json j;
        j["chunk_id"] = pick->chunk.id;
        j["scheme"] = json::parse(schemes.at(pick->chunk.scheme_id)->json());
        j["start"] = pick->chunk.start;
        j["count"] = pick->chunk.count;
        j["lease_seconds"] = cfg.lease_seconds;
        res.set_content(j.dump(), "application/json");
    }

    void handle_result(const httplib::Request& req, httplib::Response& res) {
        json body;
        std::string chunk_id, worker, status;
        std::vector<Hit> hits;
        try {
            body = json::parse(req.body);
            chunk_id = body.at("chunk_id").get<std::string>();
            worker = body.at("worker").get<std::string>();
            status = body.at("status").get<std::string>();
            if (status != "ok" && status != "error") throw std::invalid_argument("status must be ok or error");
            for (const auto& h : body.at("hits")) {
                Hit hit{h.at("a").get<std::string>(), h.at("b").get<std::string>(), h.at("ln_s").get<double>(),
                        h.at("dhat").get<double>(), h.at("verdict").get<std::string>()};
                Pcf::parse(hit.a, hit.b);
                verdict_from_name(hit.verdict);
                hits.push_back(hit);
            }
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(mu);
            ++rejected_posts;
            return send_error(res, 400, RM_ERR_MALFORMED_RESULT, e.what());
        }
        std::lock_guard<std::mutex> lock(mu);
        auto it = by_id.find(chunk_id);
        if (it == by_id.end()) return send_error(res, 404, RM_ERR_UNKNOWN_CHUNK, "unknown chunk " + chunk_id);
        ChunkState& c = chunks[it->second];
        if (c.state == State::Done) {
            ++duplicates;
            res.set_content(json{{"accepted", false}}.dump(), "application/json");
            return;
        }
        if (c.state == State::Leased && c.worker != worker && c.expiry > Clock::now())
            return send_error(res, 409, RM_ERR_LEASE_EXPIRED, "chunk " + chunk_id + " is leased to another worker");
        if (status == "error") {
            if (c.worker == worker) c.state = State::Pending;
            res.set_content(json{{"accepted", false}}.dump(), "application/json");
            return;
        }
        json line;
        line["chunk_id"] = chunk_id;
        line["scheme_id"] = c.chunk.scheme_id;
        line["start"] = c.chunk.start;
        line["count"] = c.chunk.count;
        line["worker"] = worker;
        line["status"] = status;
        json hj = json::array();
        for (const auto& h : hits) hj.push_back(hit_json(h));
        line["hits"] = hj;
        if (body.contains("wall_time")) line["wall_time"] = body["wall_time"];
        try {
            append("results.jsonl", line.dump());
        } catch (const Error& e) {
            return send_error(res, 500, RM_ERR_IO, e.what());
        }
        c.state = State::Done;
        c.hits = long(hits.size());
        result_index[chunk_id] = result_lines++;
        bump_index_locked();
        if (cfg.verify)
            for (const auto& h : hits) queue.push_back({chunk_id, h});
        cv.notify_all();
        res.set_content(json{{"accepted", true}}.dump(), "application/json");
    }

    void verifier_loop() {
        std::unique_lock<std::mutex> lock(mu);
        for (;;) {
            cv.wait(lock, [&] { return stopping || !queue.empty(); });
            if (stopping) return;
            Pending p = queue.front();
            queue.pop_front();
            std::string key = p.hit.a + "|" + p.hit.b;
            if (formula_keys.count(key)) {
                cv.notify_all();
                continue;
            }
            const SearchScheme* scheme = schemes.at(chunks[by_id.at(p.chunk_id)].chunk.scheme_id);
            ++in_flight;
            lock.unlock();
            std::string line;
            std::string status;
            try {
                VerifiedFormula f = verify_pipeline(Pcf::parse(p.hit.a, p.hit.b), scheme->fr_depth, cfg.constants,
                                                    cfg.match_depth);
                json j = json::parse(f.json());
                j["chunk_id"] = p.chunk_id;
                j["scheme_id"] = scheme->id;
                line = j.dump();
                status = f.status;
            } catch (const std::exception& e) {
                line = json{{"a", p.hit.a}, {"b", p.hit.b}, {"status", "rejected"}, {"error", e.what()}}.dump();
                status = "rejected";
            }
            lock.lock();
            --in_flight;
            try {
                append("formulas.jsonl", line);
                formula_keys.insert(key);
                formula_index[key] = formula_lines++;
                auto& st = stats[scheme->id];
                (status == "matched" ? st.matched : status == "unmatched" ? st.unmatched : st.rejected)++;
                bump_index_locked();
            } catch (const Error&) {
            }
            cv.notify_all();
        }
    }
};

Coordinator::Coordinator(CoordinatorConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->cfg = std::move(config);
    auto& I = *impl_;
    if (I.cfg.schemes.empty()) throw Error(RM_ERR_INVALID_ARGUMENT, "at least one scheme is required");
    for (const auto& s : I.cfg.schemes) {
        if (I.schemes.count(s.id)) throw Error(RM_ERR_INVALID_ARGUMENT, "duplicate scheme id " + s.id);
        I.schemes[s.id] = &s;
        I.stats[s.id];
        for (auto& c : chunk_scheme(s, I.cfg.chunk_size)) {
            I.by_id[c.id] = I.chunks.size();
            I.chunks.push_back({c, Impl::State::Pending, "", {}, 0});
        }
    }
}

Coordinator::~Coordinator() { stop(); }

void Coordinator::start() {
    auto& I = *impl_;
    {
        std::lock_guard<std::mutex> lock(I.mu);
        I.load_store();
    }
    I.server.Get("/v1/chunk", [&I](const httplib::Request& req, httplib::Response& res) { I.handle_chunk(req, res); });
    I.server.Post("/v1/result", [&I](const httplib::Request& req, httplib::Response& res) { I.handle_result(req, res); });
    I.server.Get("/v1/status", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(status_json(), "application/json");
    });
    if (I.cfg.port == 0) {
        I.bound_port = I.server.bind_to_any_port(I.cfg.host);
    } else {
        I.bound_port = I.server.bind_to_port(I.cfg.host, I.cfg.port) ? I.cfg.port : -1;
    }
    if (I.bound_port < 0) throw Error(RM_ERR_NETWORK, "cannot bind " + I.cfg.host + ":" + std::to_string(I.cfg.port));
    I.server_thread = std::thread([&I] { I.server.listen_after_bind(); });
    I.verifier_thread = std::thread([&I] { I.verifier_loop(); });
    I.server.wait_until_ready();
}

int Coordinator::port() const { return impl_->bound_port; }

bool Coordinator::wait(double timeout_seconds) {
    auto& I = *impl_;
    std::unique_lock<std::mutex> lock(I.mu);
    auto pred = [&] { return I.drained_locked(); };
    bool ok;
    if (timeout_seconds > 0) {
        ok = I.cv.wait_for(lock, std::chrono::duration<double>(timeout_seconds), pred);
    } else {
        I.cv.wait(lock, pred);
        ok = true;
    }
    if (ok) I.write_index_locked();
    return ok;
}

std::string Coordinator::status_json() const {
    auto& I = *impl_;
    std::lock_guard<std::mutex> lock(I.mu);
    json j;
    json per = json::object();
    for (const auto& [id, s] : I.schemes) {
        long done = 0, leased = 0, pending = 0, hits = 0, count = 0;
        for (const auto& c : I.chunks) {
            if (c.chunk.scheme_id != id) continue;
            ++count;
            hits += c.hits;
            if (c.state == Impl::State::Done) ++done;
            else if (c.state == Impl::State::Leased) ++leased;
            else ++pending;
        }
        const auto& st = I.stats.at(id);
        per[id] = {{"total", s->total()}, {"chunks", count}, {"done", done}, {"leased", leased}, {"pending", pending},
                   {"hits", hits}, {"matched", st.matched}, {"unmatched", st.unmatched}, {"rejected", st.rejected}};
    }
    j["schemes"] = per;
    j["duplicates"] = I.duplicates;
    j["reissued"] = I.reissued;
    j["malformed"] = I.rejected_posts;
    j["verify_queue"] = long(I.queue.size()) + I.in_flight;
    j["drained"] = I.drained_locked();
    return j.dump();
}

void Coordinator::stop() {
    auto& I = *impl_;
    {
        std::lock_guard<std::mutex> lock(I.mu);
        if (I.stopping) return;
        I.stopping = true;
        I.cv.notify_all();
    }
    I.server.stop();
    if (I.server_thread.joinable()) I.server_thread.join();
    if (I.verifier_thread.joinable()) I.verifier_thread.join();
    std::lock_guard<std::mutex> lock(I.mu);
    if (I.bound_port >= 0) I.write_index_locked();
}

WorkerOptions WorkerOptions::from_json(const std::string& text) {
    WorkerOptions o;
    if (text.empty()) return o;
    try {
        auto j = json::parse(text);
        o.worker_id = j.value("worker_id", o.worker_id);
        o.parallelism = j.value("parallelism", o.parallelism);
        o.max_retries = j.value("max_retries", o.max_retries);
        o.backoff_seconds = j.value("backoff_seconds", o.backoff_seconds);
        o.poll_seconds = j.value("poll_seconds", o.poll_seconds);
        o.crash_after_leases = j.value("crash_after_leases", o.crash_after_leases);
        o.duplicate_posts = j.value("duplicate_posts", o.duplicate_posts);
    } catch (const json::exception& e) {
        throw Error(RM_ERR_INVALID_ARGUMENT, std::string("worker options: ") + e.what());
    }
    return o;
}

std::string WorkerSummary::json() const {
    return nlohmann::json{{"chunks", chunks}, {"hits", hits}, {"duplicates_rejected", duplicates_rejected}, {"crashed", crashed}}
        .dump();
}

namespace {

std::atomic<bool> g_worker_stop{false};

std::pair<std::string, int> split_address(std::string s) {
    for (const char* scheme : {"http://", "HTTP://"})
        if (s.rfind(scheme, 0) == 0) s = s.substr(std::strlen(scheme));
    while (!s.empty() && s.back() == '/') s.pop_back();
    auto colon = s.rfind(':');
    if (colon == std::string::npos) throw Error(RM_ERR_INVALID_ARGUMENT, "server address must be host:port");
    int port = std::atoi(s.substr(colon + 1).c_str());
    if (port <= 0) throw Error(RM_ERR_INVALID_ARGUMENT, "bad port in server address");
    return {s.substr(0, colon), port};
}

void sleep_for(double seconds) { std::this_thread::sleep_for(std::chrono::duration<double>(seconds)); }

}  // namespace

void worker_request_stop(bool stop) { g_worker_stop = stop; }

WorkerSummary worker_run(const std::string& server, const WorkerOptions& opt) {
    auto [host, port] = split_address(server);
    httplib::Client cli(host, port);
    cli.set_connection_timeout(5);
    cli.set_read_timeout(60);
    std::string id = opt.worker_id.empty() ? "worker-" + std::to_string(::getpid()) : opt.worker_id;
    WorkerSummary sum;
    long leases = 0;

    auto with_retries = [&](auto&& call) {
        double backoff = opt.backoff_seconds;
        for (int attempt = 0;; ++attempt) {
            auto res = call();
            if (res) return res;
            if (attempt >= opt.max_retries)
                throw Error(RM_ERR_NETWORK, "server " + server + " unreachable: " + httplib::to_string(res.error()));
            sleep_for(backoff);
            backoff *= 2;
        }
    };
    auto post = [&](const json& body) {
        return with_retries([&] { return cli.Post("/v1/result", body.dump(), "application/json"); });
    };

    while (!g_worker_stop) {
        auto res = with_retries([&] { return cli.Get("/v1/chunk?worker=" + id); });
        if (res->status == 204) break;
        if (res->status == 503) {
            double wait = opt.poll_seconds;
            try {
                wait = std::clamp(json::parse(res->body).value("retry_after", wait), 0.05, opt.poll_seconds);
            } catch (...) {
            }
            sleep_for(wait);
            continue;
        }
        if (res->status != 200) throw Error(RM_ERR_NETWORK, "unexpected status " + std::to_string(res->status));
        json chunk = json::parse(res->body);
        ++leases;
        if (opt.crash_after_leases >= 0 && leases > opt.crash_after_leases) {
            sum.crashed = true;
            return sum;
        }
        std::string chunk_id = chunk.at("chunk_id");
        SearchScheme scheme = SearchScheme::from_json(chunk.at("scheme").dump());
        auto t0 = Clock::now();
        std::vector<Hit> hits = run_chunk_impl(scheme, chunk.at("start").get<int64_t>(), chunk.at("count").get<int64_t>(),
                                               opt.parallelism, &g_worker_stop);
        json body;
        body["chunk_id"] = chunk_id;
        body["worker"] = id;
        if (g_worker_stop) {
            body["hits"] = json::array();
            body["status"] = "error";
            post(body);
            break;
        }
        json hj = json::array();
        for (const auto& h : hits) hj.push_back(hit_json(h));
        body["hits"] = hj;
        body["status"] = "ok";
        body["wall_time"] = std::chrono::duration<double>(Clock::now() - t0).count();
        for (int k = 0; k < (opt.duplicate_posts ? 2 : 1); ++k) {
            auto r = post(body);
            if (r->status == 200 && !json::parse(r->body).value("accepted", false) && k > 0) ++sum.duplicates_rejected;
        }
        ++sum.chunks;
        sum.hits += long(hits.size());
    }
    return sum;
}

}  // namespace rm
