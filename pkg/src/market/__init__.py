from src.market.entertainment import EntOrderBook, RestingOrder, Side
from src.market.flights import FlightAuction
from src.market.goods import (
    ALL_GOODS,
    FLIGHT_GOODS,
    HOTEL_GOODS,
    MARKET,
    TICKET_GOODS,
    TRAVEL_GOODS,
    GoodId,
    GoodKind,
)
from src.market.hotels import HotelAuction
from src.market.records import Quote, Transaction
