#pragma once
#include <stdexcept>
#include <string>

namespace obst {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid or oversized problem instance (weights, overflow guard).
class InstanceError : public Error {
public:
  using Error::Error;
};

// Malformed instance text; `line` is 1-based.
class ParseError : public Error {
public:
  ParseError(int line, const std::string& what)
      : Error("parse error at line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

// File could not be opened / read / written.
class IoError : public Error {
public:
  using Error::Error;
};

// Partition geometry cannot satisfy its preconditions.
class PlanError : public Error {
public:
  using Error::Error;
};

// Caller violated a documented precondition.
class ContractError : public Error {
public:
  using Error::Error;
};

// Corrupt or inconsistent table content (bad cut entry, mismatched sizes,
// conflicting duplicate cell values).
class TableError : public Error {
public:
  using Error::Error;
};

// A worker tried to read a cell it neither computed nor received. Carries
// enough context to diagnose the stalled round.
class MissingCellError : public Error {
public:
  MissingCellError(int i, int j, int diagonal, int worker)
      : Error("missing cell (" + std::to_string(i) + "," + std::to_string(j) + ") at diagonal " +
              std::to_string(diagonal) + " on worker " + std::to_string(worker)),
        i(i), j(j), diagonal(diagonal), worker(worker) {}
  int i, j, diagonal, worker;
};

} // namespace obst
