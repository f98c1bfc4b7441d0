#include "unistitch/error.hpp"

#include <array>
#include <iostream>
#include <utility>

namespace unistitch {
namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 13> kNames{{
    {ErrorCode::InvalidConfig, "InvalidConfig"},
    {ErrorCode::InvalidArgument, "InvalidArgument"},
    {ErrorCode::DegenerateHomography, "DegenerateHomography"},
    {ErrorCode::NoOverlap, "NoOverlap"},
    {ErrorCode::BackendUnavailable, "BackendUnavailable"},
    {ErrorCode::BackendShapeMismatch, "BackendShapeMismatch"},
    {ErrorCode::NonFiniteLatent, "NonFiniteLatent"},
    {ErrorCode::UnsupportedFormat, "UnsupportedFormat"},
    {ErrorCode::CorruptFile, "CorruptFile"},
    {ErrorCode::Io, "Io"},
    {ErrorCode::TileTooSmall, "TileTooSmall"},
    {ErrorCode::ZeroVector, "ZeroVector"},
    {ErrorCode::ProviderError, "ProviderError"},
}};

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "Unknown";
}

ErrorCode error_code_from_string(std::string_view name) noexcept {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return ErrorCode::ProviderError;
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

void warn(std::string_view message) { std::cerr << "warning: " << message << '\n'; }

}  // namespace unistitch
