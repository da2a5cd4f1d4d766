#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dado {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed file structure; offset is the byte position where parsing failed.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// Well-formed file carrying unusable values (NaN/Inf).
class DataError : public Error {
public:
    DataError(const std::string& what, std::size_t pixel)
        : Error(what + " (pixel " + std::to_string(pixel) + ")"), pixel_(pixel) {}
    std::size_t pixel() const noexcept { return pixel_; }

private:
    std::size_t pixel_;
};

class IoError : public Error {
public:
    IoError(const std::string& what, std::string path)
        : Error(what + ": " + path), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// Caller violated a precondition (dimension mismatch, empty input, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

}  // namespace dado
