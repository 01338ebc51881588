from .layers import LAYER_NAMES, layer_number
from .model import (
    BoardDoc,
    Connect,
    ContactRef,
    Device,
    DeviceSet,
    Element,
    Gate,
    Instance,
    LibraryDoc,
    Net,
    Package,
    Part,
    Pin,
    PinRef,
    Rotation,
    SchematicDoc,
    Segment,
    Sheet,
    Signal,
    Smd,
    Symbol,
    TextItem,
    ThruPad,
    Via,
    Wire,
)
from .parse import (
    BrokenReference,
    ConflictingConnection,
    Document,
    DuplicateName,
    EagleError,
    MalformedXml,
    NotABoard,
    NotALibrary,
    NotASchematic,
    UnknownDocument,
    document_kind,
    parse_board,
    parse_document,
    parse_library,
    parse_rotation,
    parse_schematic,
)
