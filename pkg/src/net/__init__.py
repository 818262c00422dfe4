from src.net.client import ClientSession, connect
from src.net.protocol import WireMessage, encode_frame, read_frame
from src.net.server import MarketServer, RemoteAgent, serve
