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
#ifndef REHAB_SERVICE_ULID_HPP_
#define REHAB_SERVICE_ULID_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace rehab::service {

/// 26-character Crockford base32 identifier: 48-bit millisecond timestamp
/// followed by 80 random bits. Identifiers from one process sort in creation
/// order even within the same millisecond.
std::string new_ulid();

/// Deterministic form for tests.
std::string encode_ulid(std::uint64_t ms, std::uint64_t rand_hi16, std::uint64_t rand_lo64);

bool is_ulid(std::string_view s);

}  // namespace rehab::service

#endif  // REHAB_SERVICE_ULID_HPP_
