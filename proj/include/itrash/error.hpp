// Copyright 2026 The iTrash Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace itrash {

enum class ErrorCode
{
  invalid_argument,
  missing_field,
  invalid_record,
  duplicate_record,
  unknown_record,
  out_of_order,
  parse_error,
  unknown_channel,
  invalid_table,
  empty_input,
  missing_annotation,
  insufficient_funds,
  unknown_address,
  non_positive_amount,
  duplicate_memo,
  malformed_payload,
  invalid_ngo,
  no_active_session,
  transport,
  io,
  inconsistent_spec,
  controller_stuck,
  unsupported,
};

constexpr std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::missing_field: return "missing-field";
    case ErrorCode::invalid_record: return "invalid-record";
    case ErrorCode::duplicate_record: return "duplicate-record";
    case ErrorCode::unknown_record: return "unknown-record";
    case ErrorCode::out_of_order: return "out-of-order";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::unknown_channel: return "unknown-channel";
    case ErrorCode::invalid_table: return "invalid-table";
    case ErrorCode::empty_input: return "empty-input";
    case ErrorCode::missing_annotation: return "missing-annotation";
    case ErrorCode::insufficient_funds: return "insufficient-funds";
    case ErrorCode::unknown_address: return "unknown-address";
    case ErrorCode::non_positive_amount: return "non-positive-amount";
    case ErrorCode::duplicate_memo: return "duplicate-memo";
    case ErrorCode::malformed_payload: return "malformed-payload";
    case ErrorCode::invalid_ngo: return "invalid-ngo-id";
    case ErrorCode::no_active_session: return "no-active-session";
    case ErrorCode::transport: return "transport";
    case ErrorCode::io: return "io";
    case ErrorCode::inconsistent_spec: return "inconsistent-spec";
    case ErrorCode::controller_stuck: return "controller-stuck";
    case ErrorCode::unsupported: return "unsupported";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI, gateway) can map it to an exit status or HTTP code.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message)
    , code_(code)
  {
  }

  [[nodiscard]] ErrorCode code() const noexcept
  {
    return code_;
  }

private:
  ErrorCode code_;
};

}  // namespace itrash
