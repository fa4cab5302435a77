#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fdinet {

enum class ErrorKind {
  // ingestion
  MissingColumn,
  DuplicateDyad,
  NegativeValue,
  AsymmetricSymmetricCovariate,
  InconsistentControl,
  ParseError,
  EmptyInput,
  SelfPair,
  // graphs / measures
  EmptyGraph,
  RegistryMismatch,
  NoDefinedPairs,
  AlphaNotOne,
  InvalidArgument,
  // estimation
  RankDeficient,
  EmptySample,
  Separation,
  NotConverged,
  NoZeros,
  UnderIdentified,
  NoCriticalValue,
  ZeroVariance,
  InvalidSpec,
  // synth / oracles
  ConfigInvalid,
  TooLarge,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::DuplicateDyad: return "DuplicateDyad";
    case ErrorKind::NegativeValue: return "NegativeValue";
    case ErrorKind::AsymmetricSymmetricCovariate: return "AsymmetricSymmetricCovariate";
    case ErrorKind::InconsistentControl: return "InconsistentControl";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::SelfPair: return "SelfPair";
    case ErrorKind::EmptyGraph: return "EmptyGraph";
    case ErrorKind::RegistryMismatch: return "RegistryMismatch";
    case ErrorKind::NoDefinedPairs: return "NoDefinedPairs";
    case ErrorKind::AlphaNotOne: return "AlphaNotOne";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::Separation: return "Separation";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::NoZeros: return "NoZeros";
    case ErrorKind::UnderIdentified: return "UnderIdentified";
    case ErrorKind::NoCriticalValue: return "NoCriticalValue";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::TooLarge: return "TooLarge";
  }
  return "Unknown";
}

/// Every recoverable failure in the library is reported as an Error carrying
/// its kind; the message is prefixed with the kind name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace fdinet
