#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rm/fr.hpp"
#include "rm/pcf.hpp"
#include "rm/relation.hpp"

namespace rm {

struct IntRange {
    long lo = 0, hi = -1;  // inclusive
    int64_t size() const { return hi < lo ? 0 : int64_t(hi) - int64_t(lo) + 1; }
};

// box: a and b coefficient ranges by ascending power.
// sigma: a = sum c_k sigma(n, d - 2k) with sigma(n, e) = n^e + (n+1)^e, b = -B n^(2d).
// zigzag: a = prod(n + r_i) + c prod(n + 1 + s_i), b = -c prod(n + r_i)(n + s_i).
struct SearchScheme {
    std::string id;
    std::string kind;
    std::vector<IntRange> a, b;  // box
    int d = 3;                   // sigma
    std::vector<IntRange> c;     // sigma coefficients c_d, c_(d-2), ...
    IntRange B{1, 1};            // sigma
    std::vector<IntRange> r, s;  // zigzag
    IntRange zc{1, 1};           // zigzag c
    long fr_depth = 512;

    // Candidate count; IndexRange if it does not fit in 63 bits.
    int64_t total() const;
    // Bijective, stateless: the first range is the most significant digit.
    Pcf enumerate(int64_t index) const;
    std::string json() const;
    static SearchScheme from_json(const std::string& text);

private:
    std::vector<IntRange> ranges() const;
};

struct Chunk {
    std::string id;
    std::string scheme_id;
    int64_t start = 0;
    int64_t count = 0;
};

std::vector<Chunk> chunk_scheme(const SearchScheme& scheme, int64_t chunk_size);

struct Hit {
    std::string a, b;
    double ln_s = 0, dhat = 0;
    std::string verdict;
};

// classify_fr over a chunk; hits are FactorialReduction and Inconclusive candidates, in index order.
std::vector<Hit> run_chunk(const SearchScheme& scheme, int64_t start, int64_t count, int parallelism = 1);

struct VerifiedFormula {
    Pcf pcf;
    GrowthEstimate growth;
    std::string status;  // matched | unmatched | rejected
    std::optional<Match> match;
    std::string value;   // limit, when computed
    long value_digits = 0;
    std::string json() const;
};

VerifiedFormula verify_pipeline(const Pcf& pcf, long scheme_depth, const std::vector<std::string>& constants,
                                long match_depth = 300);

struct CoordinatorConfig {
    std::vector<SearchScheme> schemes;
    std::string host = "127.0.0.1";
    int port = 0;  // 0: any free port
    int64_t chunk_size = 10000;
    long lease_seconds = 1800;
    std::string store_dir = "rm_store";
    std::vector<std::string> constants;
    bool verify = true;
    long match_depth = 300;
    // Lease seconds fall back to RM_LEASE_SECONDS when absent from the JSON.
    static CoordinatorConfig from_json(const std::string& text);
};

class Coordinator {
public:
    explicit Coordinator(CoordinatorConfig config);
    ~Coordinator();
    Coordinator(const Coordinator&) = delete;
    Coordinator& operator=(const Coordinator&) = delete;

    void start();
    int port() const;
    // True once every chunk is stored and every hit verified.
    bool wait(double timeout_seconds);
    std::string status_json() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct WorkerOptions {
    std::string worker_id;
    int parallelism = 1;
    int max_retries = 6;
    double backoff_seconds = 0.2;  // doubled per retry
    double poll_seconds = 0.5;     // wait when all chunks are leased
    long crash_after_leases = -1;  // test hook: abandon the Nth lease without posting
    bool duplicate_posts = false;  // test hook: post every result twice
    static WorkerOptions from_json(const std::string& text);
};

struct WorkerSummary {
    long chunks = 0;
    long hits = 0;
    long duplicates_rejected = 0;
    bool crashed = false;
    std::string json() const;
};

// Runs until the coordinator reports drained. Network failures are retried with
// exponential backoff; exhausting the retries raises a Network error.
WorkerSummary worker_run(const std::string& server, const WorkerOptions& options);

// Asks running workers to abandon their current chunk (posted back as status "error") and return.
void worker_request_stop(bool stop = true);

}  // namespace rm
