#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gfq {

// I/O failure (file missing, unreadable). Distinct from DataError so callers
// can map "bad path" and "bad content" to different exit codes.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed content in an otherwise readable input.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A recoverable per-line problem in a record file.
struct LineError {
  int line = 0;
  std::string message;
};

enum class BackendErrorKind { transport, timeout, protocol };

inline const char* to_string(BackendErrorKind k) {
  switch (k) {
    case BackendErrorKind::transport: return "transport";
    case BackendErrorKind::timeout: return "timeout";
    case BackendErrorKind::protocol: return "protocol";
  }
  return "?";
}

// Failure of a model capability (oracle misuse or remote call).
class BackendError : public std::runtime_error {
 public:
  BackendError(BackendErrorKind kind, std::string endpoint, int attempts,
               const std::string& msg)
      : std::runtime_error("backend error [" + endpoint + ", " +
                           to_string(kind) + ", attempts=" +
                           std::to_string(attempts) + "]: " + msg),
        kind_(kind),
        endpoint_(std::move(endpoint)),
        attempts_(attempts) {}

  BackendErrorKind kind() const { return kind_; }
  const std::string& endpoint() const { return endpoint_; }
  int attempts() const { return attempts_; }

 private:
  BackendErrorKind kind_;
  std::string endpoint_;
  int attempts_;
};

// A backend failure annotated with the pipeline stage and item it hit.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& context,
             const std::string& cause)
      : std::runtime_error("stage " + stage + " (" + context + "): " + cause),
        stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// splitmix64 (Vigna); the one source of randomness, so runs reproduce
// bit-exactly across platforms.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct SplitMix64 {
  std::uint64_t state = 0;
  std::uint64_t next() { return splitmix64_next(state); }
};

inline std::string join_tokens(const std::vector<std::string>& tokens,
                               const std::string& sep = " ") {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

// Applies fn to every index in [0, n) on up to `threads` workers and returns
// results in input order. The first exception, if any, is rethrown after all
// workers have joined.
template <typename R>
std::vector<R> parallel_map(size_t n, const std::function<R(size_t)>& fn,
                            unsigned threads = 0) {
  std::vector<R> out(n);
  if (n == 0) return out;
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 2;
  if (threads > n) threads = static_cast<unsigned>(n);

  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }

  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          out[i] = fn(i);
        } catch (...) {
          if (!failed.exchange(true)) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace gfq
