#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "gmv/wideint.hpp"

namespace gmv {

inline u64 fnv1a64(const void* data, size_t len, u64 seed = 0xcbf29ce484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  u64 h = seed;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline u64 fnv1a64(const std::string& s, u64 seed = 0xcbf29ce484222325ULL) {
  return fnv1a64(s.data(), s.size(), seed);
}

inline std::string hex64(u64 v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
  return buf;
}

class Stopwatch {
 public:
  Stopwatch() : start_(clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }
  void reset() { start_ = clock::now(); }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_;
};

inline std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

// GMV_LOG=1 progress notes, GMV_LOG=2 per-node detail.
inline int log_level() {
  static int lvl = [] {
    const char* e = std::getenv("GMV_LOG");
    return e ? std::atoi(e) : 0;
  }();
  return lvl;
}

template <class... Args>
inline void logf(int level, const char* fmt, Args... args) {
  if (log_level() >= level) {
    std::fprintf(stderr, "[gmv] ");
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
  }
}

// Runs fn(chunk_index, begin, end) on `threads` workers over [0, count).
// Chunk boundaries depend only on (count, threads), so any per-chunk
// accumulation can be merged in chunk order deterministically.
inline void parallel_chunks(size_t count, int threads,
                            const std::function<void(int, size_t, size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    fn(0, 0, count);
    return;
  }
  int nchunks = threads;
  if (size_t(nchunks) > count) nchunks = int(count);
  std::vector<std::thread> pool;
  pool.reserve(nchunks);
  size_t base = count / nchunks, extra = count % nchunks, begin = 0;
  for (int c = 0; c < nchunks; ++c) {
    size_t len = base + (size_t(c) < extra ? 1 : 0);
    pool.emplace_back(fn, c, begin, begin + len);
    begin += len;
  }
  for (auto& t : pool) t.join();
}

}  // namespace gmv
