#pragma once

#include <stdexcept>
#include <string>

namespace canary {

/// Base for every error the toolkit raises deliberately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed caller input (IP literal, request field, file line).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Value space exhausted for a slot.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Persisted data references something that does not exist.
class DataIntegrityError : public Error {
 public:
  using Error::Error;
};

/// Chatbot client could not complete a query.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace canary
