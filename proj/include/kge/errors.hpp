#pragma once
// Exception hierarchy shared by every kge module.
//
//   Error                 base, carries a one-line diagnostic
//   ├── ArgumentError     bad sizes, indices, names, configs
//   ├── DatasetNotFound   missing dataset directory or split file
//   ├── ParseError        malformed input line (file + 1-based line)
//   ├── IoError           unwritable / unreadable output files
//   └── EnvironmentError  clock or memory probe unavailable

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class DatasetNotFound : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

class EnvironmentError : public Error {
public:
    using Error::Error;
};

}  // namespace kge
