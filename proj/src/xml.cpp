#include "hagent/xml.hpp"

#include <map>

namespace hagent::xml {

const std::string* Element::attr(std::string_view localName) const noexcept
{
    for (const auto& a : attributes)
        if (a.ns.empty() && a.local == localName)
            return &a.value;
    return nullptr;
}

const Attribute* Element::attribute(std::string_view nsUri, std::string_view localName) const noexcept
{
    for (const auto& a : attributes)
        if (a.ns == nsUri && a.local == localName)
            return &a;
    return nullptr;
}

namespace {

constexpr std::size_t kMaxDepth = 256;

struct Failure {
    std::string message;
    std::size_t offset;
};

bool isSpace(char c) noexcept
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool isNameStart(char c) noexcept
{
    auto u = static_cast<unsigned char>(c);
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || u >= 0x80;
}

bool isNameChar(char c) noexcept
{
    return isNameStart(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

void appendUtf8(std::string& out, unsigned long cp)
{
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class Reader {
public:
    explicit Reader(std::string_view src) : src_(src) {}

    Document document()
    {
        if (src_.substr(0, 3) == "\xEF\xBB\xBF")
            pos_ = 3;
        if (lookingAt("<?xml") && pos_ + 5 < src_.size() && isSpace(src_[pos_ + 5]))
            skipPast("?>", "unterminated XML declaration");
        misc(true);
        if (atEnd() || peek() != '<')
            fail("document has no root element");

        Document doc;
        scopes_.emplace_back();
        scopes_.back()["xml"] = std::string(kXmlNamespace);
        doc.root = element(0);
        misc(false);
        if (!atEnd())
            fail("content after the root element");
        doc.declarations = std::move(declarations_);
        return doc;
    }

private:
    bool atEnd() const noexcept { return pos_ >= src_.size(); }
    char peek() const noexcept { return src_[pos_]; }
    bool lookingAt(std::string_view s) const noexcept { return src_.compare(pos_, s.size(), s) == 0; }

    [[noreturn]] void fail(std::string message) const { throw Failure{std::move(message), pos_}; }

    void expect(char c)
    {
        if (atEnd() || peek() != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skipSpace()
    {
        while (!atEnd() && isSpace(peek()))
            ++pos_;
    }

    void skipPast(std::string_view terminator, const char* what)
    {
        auto at = src_.find(terminator, pos_);
        if (at == std::string_view::npos)
            fail(what);
        pos_ = at + terminator.size();
    }

    void comment()
    {
        pos_ += 4;
        auto at = src_.find("--", pos_);
        if (at == std::string_view::npos)
            fail("unterminated comment");
        if (at + 2 >= src_.size() || src_[at + 2] != '>') {
            pos_ = at;
            fail("'--' inside comment");
        }
        pos_ = at + 3;
    }

    void misc(bool allowDoctype)
    {
        for (;;) {
            skipSpace();
            if (lookingAt("<!--")) {
                comment();
            } else if (lookingAt("<?")) {
                skipPast("?>", "unterminated processing instruction");
            } else if (allowDoctype && lookingAt("<!DOCTYPE")) {
                auto close = src_.find('>', pos_);
                auto bracket = src_.find('[', pos_);
                if (bracket != std::string_view::npos && bracket < close)
                    fail("DOCTYPE internal subsets are not supported");
                skipPast(">", "unterminated DOCTYPE");
                allowDoctype = false;
            } else {
                return;
            }
        }
    }

    std::string name()
    {
        auto start = pos_;
        if (atEnd() || !isNameStart(peek()))
            fail("expected a name");
        while (!atEnd() && isNameChar(peek()))
            ++pos_;
        return std::string(src_.substr(start, pos_ - start));
    }

    void reference(std::string& out)
    {
        ++pos_; // '&'
        auto semi = src_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 12)
            fail("malformed character reference");
        auto ref = src_.substr(pos_, semi - pos_);
        if (ref == "lt") out += '<';
        else if (ref == "gt") out += '>';
        else if (ref == "amp") out += '&';
        else if (ref == "quot") out += '"';
        else if (ref == "apos") out += '\'';
        else if (ref.size() > 1 && ref[0] == '#') {
            bool hex = ref[1] == 'x';
            auto digits = ref.substr(hex ? 2 : 1);
            if (digits.empty())
                fail("empty character reference");
            unsigned long cp = 0;
            for (char c : digits) {
                int v;
                if (c >= '0' && c <= '9') v = c - '0';
                else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
                else fail("bad digit in character reference");
                cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(v);
                if (cp > 0x10FFFF)
                    fail("character reference out of range");
            }
            bool allowed = cp == 0x9 || cp == 0xA || cp == 0xD || (cp >= 0x20 && cp <= 0xD7FF) ||
                           (cp >= 0xE000 && cp <= 0xFFFD) || cp >= 0x10000;
            if (!allowed)
                fail("character reference to a disallowed character");
            appendUtf8(out, cp);
        } else {
            fail("undefined entity '&" + std::string(ref) + ";'");
        }
        pos_ = semi + 1;
    }

    std::string attributeValue()
    {
        if (atEnd() || (peek() != '"' && peek() != '\''))
            fail("expected a quoted attribute value");
        char quote = src_[pos_++];
        std::string out;
        for (;;) {
            if (atEnd())
                fail("unterminated attribute value");
            char c = peek();
            if (c == quote) {
                ++pos_;
                return out;
            }
            if (c == '<')
                fail("'<' in attribute value");
            if (c == '&') {
                reference(out);
                continue;
            }
            out += isSpace(c) ? ' ' : c;
            ++pos_;
        }
    }

    static void split(const std::string& qname, std::string& prefix, std::string& local)
    {
        auto colon = qname.find(':');
        if (colon == std::string::npos) {
            prefix.clear();
            local = qname;
        } else {
            prefix = qname.substr(0, colon);
            local = qname.substr(colon + 1);
        }
    }

    const std::string* resolve(const std::string& prefix) const
    {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto found = it->find(prefix);
            if (found != it->end())
                return &found->second;
        }
        return nullptr;
    }

    Element element(std::size_t depth)
    {
        if (depth > kMaxDepth)
            fail("element nesting too deep");
        Element el;
        el.begin = pos_;
        expect('<');
        el.qname = name();

        struct RawAttr {
            std::string qname, value;
            std::size_t offset;
        };
        std::vector<RawAttr> raw;
        for (;;) {
            bool spaced = !atEnd() && isSpace(peek());
            skipSpace();
            if (atEnd())
                fail("unterminated start tag");
            if (peek() == '>' || lookingAt("/>"))
                break;
            if (!spaced)
                fail("attributes must be separated by whitespace");
            auto offset = pos_;
            auto qname = name();
            skipSpace();
            expect('=');
            skipSpace();
            auto value = attributeValue();
            for (const auto& a : raw)
                if (a.qname == qname) {
                    pos_ = offset;
                    fail("duplicate attribute '" + qname + "'");
                }
            raw.push_back({std::move(qname), std::move(value), offset});
        }

        scopes_.emplace_back();
        for (const auto& a : raw) {
            std::string declared;
            if (a.qname == "xmlns")
                declared = "";
            else if (a.qname.rfind("xmlns:", 0) == 0)
                declared = a.qname.substr(6);
            else
                continue;
            if (!declared.empty() && a.value.empty()) {
                pos_ = a.offset;
                fail("prefix '" + declared + "' bound to an empty namespace");
            }
            scopes_.back()[declared] = a.value;
            el.nsDecls.emplace_back(declared, a.value);
            bool known = false;
            for (const auto& d : declarations_)
                known = known || d.first == declared;
            if (!known)
                declarations_.emplace_back(declared, a.value);
        }

        split(el.qname, el.prefix, el.local);
        if (const auto* uri = resolve(el.prefix))
            el.ns = *uri;
        else if (!el.prefix.empty())
            fail("unbound namespace prefix '" + el.prefix + "'");

        for (auto& a : raw) {
            if (a.qname == "xmlns" || a.qname.rfind("xmlns:", 0) == 0)
                continue;
            Attribute attr;
            attr.qname = std::move(a.qname);
            split(attr.qname, attr.prefix, attr.local);
            if (!attr.prefix.empty()) {
                const auto* uri = resolve(attr.prefix);
                if (!uri) {
                    pos_ = a.offset;
                    fail("unbound namespace prefix '" + attr.prefix + "'");
                }
                attr.ns = *uri;
            }
            for (const auto& other : el.attributes)
                if (!attr.ns.empty() && other.ns == attr.ns && other.local == attr.local) {
                    pos_ = a.offset;
                    fail("duplicate attribute '" + attr.qname + "'");
                }
            attr.value = std::move(a.value);
            el.attributes.push_back(std::move(attr));
        }

        if (lookingAt("/>")) {
            pos_ += 2;
            el.end = pos_;
            scopes_.pop_back();
            return el;
        }
        expect('>');
        content(el, depth);
        scopes_.pop_back();
        return el;
    }

    void content(Element& el, std::size_t depth)
    {
        for (;;) {
            if (atEnd())
                fail("unterminated element '" + el.qname + "'");
            char c = peek();
            if (c == '<') {
                if (lookingAt("</")) {
                    pos_ += 2;
                    auto closing = name();
                    if (closing != el.qname)
                        fail("mismatched end tag '" + closing + "', expected '" + el.qname + "'");
                    skipSpace();
                    expect('>');
                    el.end = pos_;
                    return;
                }
                if (lookingAt("<!--")) {
                    comment();
                } else if (lookingAt("<![CDATA[")) {
                    pos_ += 9;
                    auto close = src_.find("]]>", pos_);
                    if (close == std::string_view::npos)
                        fail("unterminated CDATA section");
                    el.text.append(src_.substr(pos_, close - pos_));
                    pos_ = close + 3;
                } else if (lookingAt("<?")) {
                    skipPast("?>", "unterminated processing instruction");
                } else if (lookingAt("<!")) {
                    fail("unexpected markup declaration");
                } else {
                    el.children.push_back(element(depth + 1));
                }
            } else if (c == '&') {
                reference(el.text);
            } else {
                if (lookingAt("]]>"))
                    fail("']]>' in character data");
                el.text += c;
                ++pos_;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::vector<std::map<std::string, std::string>> scopes_;
    std::vector<std::pair<std::string, std::string>> declarations_;
};

} // namespace

ParseOutcome parse(std::string_view source)
{
    ParseOutcome outcome;
    try {
        outcome.document = Reader(source).document();
    } catch (const Failure& f) {
        ParseError err;
        err.message = f.message;
        err.line = 1;
        std::size_t lineStart = 0;
        for (std::size_t i = 0; i < f.offset && i < source.size(); ++i)
            if (source[i] == '\n') {
                ++err.line;
                lineStart = i + 1;
            }
        err.column = f.offset - lineStart + 1;
        outcome.error = std::move(err);
    }
    return outcome;
}

std::string escapeText(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '\r': out += "&#13;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string escapeAttribute(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\t': out += "&#9;"; break;
        case '\n': out += "&#10;"; break;
        case '\r': out += "&#13;"; break;
        default: out += c;
        }
    }
    return out;
}

void Writer::declaration()
{
    out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
}

void Writer::indent()
{
    out_.append(static_cast<std::size_t>(depth_) * 2, ' ');
}

void Writer::startTag(std::string_view name, const Attributes& attributes)
{
    indent();
    out_ += '<';
    out_ += name;
    for (const auto& [key, value] : attributes) {
        out_ += ' ';
        out_ += key;
        out_ += "=\"";
        out_ += escapeAttribute(value);
        out_ += '"';
    }
}

void Writer::open(std::string_view name, const Attributes& attributes)
{
    startTag(name, attributes);
    out_ += ">\n";
    ++depth_;
}

void Writer::close(std::string_view name)
{
    --depth_;
    indent();
    out_ += "</";
    out_ += name;
    out_ += ">\n";
}

void Writer::empty(std::string_view name, const Attributes& attributes)
{
    startTag(name, attributes);
    out_ += "/>\n";
}

void Writer::textElement(std::string_view name, std::string_view text, const Attributes& attributes)
{
    startTag(name, attributes);
    out_ += '>';
    out_ += escapeText(text);
    out_ += "</";
    out_ += name;
    out_ += ">\n";
}

void Writer::raw(std::string_view markup)
{
    indent();
    out_ += markup;
    out_ += '\n';
}

} // namespace hagent::xml
