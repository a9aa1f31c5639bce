#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "npefix/frontend/ast.hpp"

namespace npefix {

/// Base class of every diagnostic raised by the frontend.
class FrontendError : public std::runtime_error {
public:
  FrontendError(std::string path, Span span, const std::string& message)
      : std::runtime_error(format(path, span, message)), path_(std::move(path)), span_(span),
        message_(message) {}

  const std::string& path() const { return path_; }
  Span span() const { return span_; }
  const std::string& message() const { return message_; }

private:
  static std::string format(const std::string& path, Span span, const std::string& message) {
    return path + ":" + std::to_string(span.line) + ":" + std::to_string(span.col) + ": " +
           message;
  }

  std::string path_;
  Span span_;
  std::string message_;
};

class SyntaxError : public FrontendError {
public:
  SyntaxError(std::string path, Span span, const std::string& message,
              std::vector<std::string> expected = {})
      : FrontendError(std::move(path), span, message), expected_(std::move(expected)) {}

  const std::vector<std::string>& expected() const { return expected_; }

private:
  std::vector<std::string> expected_;
};

class TypeError : public FrontendError {
public:
  using FrontendError::FrontendError;
};

}  // namespace npefix
