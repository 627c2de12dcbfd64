// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace palibench {

// Bad inputs, schema violations, contract breaches. CLI exit code 1.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Upstream provider failures (chat, embedding, scorer). CLI exit code 2.
class ClientError : public std::runtime_error {
  public:
    explicit ClientError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public ValidationError {
  public:
    explicit IoError(const std::string& msg) : ValidationError(msg) {}
};

} // namespace palibench
