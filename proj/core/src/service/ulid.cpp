/* Copyright 2026 The Rehab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "rehab/service/ulid.hpp"

#include <chrono>
#include <mutex>
#include <random>

namespace rehab::service {

namespace {

constexpr char kAlphabet[] = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";

}  // namespace

std::string encode_ulid(std::uint64_t ms, std::uint64_t hi16, std::uint64_t lo64) {
  std::string out(26, '0');
  // 10 chars of time (50 bits, top 2 zero), 16 chars of randomness (80 bits).
  for (int i = 9; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kAlphabet[ms & 31];
    ms >>= 5;
  }
  hi16 &= 0xffff;
  for (int i = 25; i >= 10; --i) {
    out[static_cast<std::size_t>(i)] = kAlphabet[lo64 & 31];
    lo64 = (lo64 >> 5) | ((hi16 & 31) << 59);
    hi16 >>= 5;
  }
  return out;
}

std::string new_ulid() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  static std::uint64_t last_ms = 0, hi = 0, lo = 0;
  std::lock_guard<std::mutex> lock(mu);
  const auto ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
          .count());
  if (ms <= last_ms) {
    // Same millisecond: increment the random part to keep ordering.
    if (++lo == 0) hi = (hi + 1) & 0xffff;
  } else {
    last_ms = ms;
    hi = rng() & 0xffff;
    lo = rng() >> 1;  // leave headroom for increments
  }
  return encode_ulid(last_ms, hi, lo);
}

bool is_ulid(std::string_view s) {
  if (s.size() != 26) return false;
  if (s[0] > '7') return false;
  for (char c : s) {
    bool ok = false;
    for (const char* a = kAlphabet; *a; ++a) ok = ok || *a == c;
    if (!ok) return false;
  }
  return true;
}

}  // namespace rehab::service
