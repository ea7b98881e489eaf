/* Copyright 2026 The semcurate Authors. All Rights Reserved.

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

#ifndef SEMCURATE_ERROR_HPP_
#define SEMCURATE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace semcurate {

// Broad failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kInvalidArgument,
  kParse,
  kValidation,
  kIo,
  kConfig,
  kProtocol,
  kWorker,
  kTimeout,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

  // Worker failures and timeouts may succeed on a fresh attempt.
  bool retryable() const noexcept {
    return kind_ == ErrorKind::kWorker || kind_ == ErrorKind::kTimeout;
  }

 private:
  ErrorKind kind_;
};

}  // namespace semcurate

#endif  // SEMCURATE_ERROR_HPP_
