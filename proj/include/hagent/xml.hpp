#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Minimal non-validating XML 1.0 reader and writer.
//
// Supports elements, attributes, namespaces, the predefined and numeric
// character references, CDATA, comments and processing instructions.
// DOCTYPE declarations are accepted only without an internal subset, so no
// user-defined entity is ever expanded.
namespace hagent::xml {

inline constexpr std::string_view kXmlNamespace = "http://www.w3.org/XML/1998/namespace";

struct Attribute {
    std::string qname;
    std::string prefix;
    std::string local;
    std::string ns; // empty for unprefixed attributes
    std::string value;
};

struct Element {
    std::string qname;
    std::string prefix;
    std::string local;
    std::string ns;
    std::vector<Attribute> attributes;                        // namespace declarations excluded
    std::vector<std::pair<std::string, std::string>> nsDecls; // declared on this element
    std::vector<Element> children;
    std::string text; // direct character data, references decoded
    std::size_t begin = 0; // byte offset of '<'
    std::size_t end = 0;   // one past the closing '>'

    bool is(std::string_view nsUri, std::string_view localName) const noexcept
    {
        return ns == nsUri && local == localName;
    }

    /// Unqualified attribute lookup.
    const std::string* attr(std::string_view localName) const noexcept;
    const Attribute* attribute(std::string_view nsUri, std::string_view localName) const noexcept;
};

struct Document {
    Element root;
    /// Every namespace declaration in document order, first binding per prefix.
    std::vector<std::pair<std::string, std::string>> declarations;
};

struct ParseError {
    std::string message;
    std::size_t line = 0;
    std::size_t column = 0;
};

struct ParseOutcome {
    std::optional<Document> document;
    std::optional<ParseError> error;
};

ParseOutcome parse(std::string_view source);

std::string escapeText(std::string_view text);
std::string escapeAttribute(std::string_view text);

/// Indented, byte-deterministic XML emitter.
class Writer {
public:
    using Attributes = std::vector<std::pair<std::string, std::string>>;

    void declaration();
    void open(std::string_view name, const Attributes& attributes = {});
    void close(std::string_view name);
    void empty(std::string_view name, const Attributes& attributes = {});
    void textElement(std::string_view name, std::string_view text, const Attributes& attributes = {});
    /// Emits pre-serialized markup verbatim on its own line.
    void raw(std::string_view markup);

    const std::string& str() const noexcept { return out_; }
    std::string take() { return std::move(out_); }

private:
    void indent();
    void startTag(std::string_view name, const Attributes& attributes);

    std::string out_;
    int depth_ = 0;
};

} // namespace hagent::xml
