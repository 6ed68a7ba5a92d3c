#pragma once

#include <stdexcept>
#include <string>

namespace mcqn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain of an operation (degenerate ray,
/// non-Jackson network passed to the oracle, threshold out of range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The dense traffic-equation solve failed.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Queue operation on a class that is not served at the station.
class ForeignClassError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Deletion from an empty queue, or of a class absent from the queue.
class EmptyDeleteError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Transition with zero rate at the current state.
class IllegalEventError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Jump distribution requested at a state with zero holding rate.
class StalledStateError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A single simulation run exceeded its event cap.
class EventBudgetError : public Error {
public:
    using Error::Error;
};

/// Malformed or unreadable configuration / network file.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace mcqn
