#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sciball {

  //! Raised when an operation is called outside its documented domain.
  class PreconditionError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
  };

  //! Raised when a size or search budget is exhausted before completion.
  class BudgetExceeded : public std::runtime_error {
   public:
    BudgetExceeded(std::string const& what, std::size_t reached)
        : std::runtime_error(what), reached_(reached) {}

    //! Amount of work done (vertices, states, ...) when the budget ran out.
    std::size_t reached() const noexcept {
      return reached_;
    }

   private:
    std::size_t reached_;
  };

  //! Raised when a construction needs more room than the ball provides.
  class WindowError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
  };

  //! Parse failure carrying a 1-based line and column.
  class ParseError : public std::runtime_error {
   public:
    ParseError(std::string const& msg, std::size_t line, std::size_t column)
        : std::runtime_error("line " + std::to_string(line) + ", column "
                             + std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept {
      return line_;
    }
    std::size_t column() const noexcept {
      return column_;
    }

   private:
    std::size_t line_;
    std::size_t column_;
  };

}  // namespace sciball
