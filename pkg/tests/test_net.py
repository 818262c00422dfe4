import io
import socket
import threading

import pytest

from src.agents import NullAgent
from src.errors import ConnectionRefused, NameTaken, ProtocolViolation, SlotExhausted
from src.game.engine import run_game
from src.net import MarketServer, connect
from src.net.protocol import Channel, WireMessage, encode_frame, read_frame


def test_frames_are_length_prefixed_canonical_json():
    frame = encode_frame(WireMessage(seq=1, kind="Hello", payload={"name": "attac"}))
    assert frame == b'51 {"kind":"Hello","payload":{"name":"attac"},"seq":1}\n'
    stream = io.BytesIO(frame + frame)
    assert read_frame(stream).payload == {"name": "attac"}
    assert read_frame(stream).kind == "Hello"
    assert read_frame(stream) is None


@pytest.mark.parametrize(
    "data",
    [
        b"x2 {}\n",
        b" {}\n",
        b"12",
        b'40 {"seq":1,"kind":"Ack","payload":{}}\n',
        b"7 not json\n",
        b'36 {"seq":1,"kind":"Nope","payload":{}}\n',
        b'27 {"kind":"Ack","payload":{}}\n',
    ],
)
def test_bad_frames_are_protocol_violations(data):
    with pytest.raises(ProtocolViolation):
        read_frame(io.BytesIO(data))


def test_channel_rejects_sequence_numbers_that_do_not_increase():
    left, right = socket.socketpair()
    channel = Channel(left)
    try:
        right.sendall(encode_frame(WireMessage(seq=2, kind="Ack", payload={"ack": 1})))
        right.sendall(encode_frame(WireMessage(seq=2, kind="Ack", payload={"ack": 2})))
        assert channel.receive().seq == 2
        with pytest.raises(ProtocolViolation):
            channel.receive()
    finally:
        channel.close()
        right.close()


def _server(config, remote_names):
    local = {d.name: NullAgent(d.name) for d in config.roster if d.name not in remote_names}
    return MarketServer(config, local, response_timeout=10.0).start()


def test_remote_agent_plays_the_same_game_as_in_process(short_config):
    server = _server(short_config, {"null-8"})
    host, port = server.address
    session = connect("null-8", host, port)
    summaries = []
    thread = threading.Thread(target=lambda: summaries.extend(session.play(NullAgent("null-8"))), daemon=True)
    thread.start()
    try:
        assert server.wait_for_agents(10)
        remote = server.play()
    finally:
        server.close()
        thread.join(10)

    local = run_game(short_config, {d.name: NullAgent(d.name) for d in short_config.roster})
    assert remote.transcript.text() == local.transcript.text()
    assert [s.scores for s in summaries] == [remote.scores]


def test_seats_are_refused_by_name_and_capacity(short_config):
    server = _server(short_config, {"null-7", "null-8"})
    host, port = server.address
    sessions = []
    try:
        with pytest.raises(ConnectionRefused):
            connect("stranger", host, port)
        sessions.append(connect("null-7", host, port))
        with pytest.raises(NameTaken):
            connect("null-7", host, port)
        sessions.append(connect("null-8", host, port))
        with pytest.raises(SlotExhausted):
            connect("stranger", host, port)
    finally:
        server.close()
        for session in sessions:
            session.channel.close()


def test_seats_close_once_play_begins(short_config):
    server = _server(short_config, {"null-8"})
    host, port = server.address
    try:
        # The unclaimed slot is played by a silent agent.
        result = server.play()
        assert result.scores["null-8"] == 0
        with pytest.raises(ConnectionRefused):
            connect("null-8", host, port)
    finally:
        server.close()


def test_unreachable_server():
    spare = socket.create_server(("127.0.0.1", 0))
    port = spare.getsockname()[1]
    spare.close()
    with pytest.raises(ConnectionRefused):
        connect("attac", "127.0.0.1", port, timeout=2.0)


def test_last_seat_is_signalled_before_its_ack_arrives(short_config):
    server = _server(short_config, {"null-7", "null-8"})
    host, port = server.address
    sessions = []
    try:
        sessions.append(connect("null-7", host, port))
        assert not server.wait_for_agents(0.2)
        sessions.append(connect("null-8", host, port))
        assert server.wait_for_agents(0)
    finally:
        server.close()
        for session in sessions:
            session.channel.close()
