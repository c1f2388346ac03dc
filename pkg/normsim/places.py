"""Places agents can be at, the goals they pursue and the actions they take."""
import collections
import enum


class PlaceKind(enum.Enum):
    HOME = 'HOME'
    PARK = 'PARK'
    CAFE = 'CAFE'
    CLINIC = 'CLINIC'

    @property
    def public(self):
        return self is not PlaceKind.HOME


PUBLIC = (PlaceKind.PARK, PlaceKind.CAFE, PlaceKind.CLINIC)


class Place(collections.namedtuple('Place', ['kind', 'owner'])):
    """
    A Home has the id of its single owner; public places have no owner.
    """
    __slots__ = ()

    @classmethod
    def home(klass, owner):
        return klass(PlaceKind.HOME, owner)

    @property
    def public(self):
        return self.kind.public


PARK = Place(PlaceKind.PARK, None)
CAFE = Place(PlaceKind.CAFE, None)
CLINIC = Place(PlaceKind.CLINIC, None)


class GoalKind(enum.Enum):
    REST = 'rest'
    HIKE = 'hike'
    SHOP = 'shop'
    BE_VACCINATED = 'be_vaccinated'


class ActionKind(enum.Enum):
    STAY_HOME = 'stay_home'
    VISIT_PARK = 'visit_park'
    VISIT_CAFE = 'visit_cafe'
    VISIT_CLINIC = 'visit_clinic'

    @property
    def index(self):
        return _action_index[self]

    @property
    def destination(self):
        return _destination[self]

    def place(self, agent_id):
        """The Place this action moves agent *agent_id* to"""
        if self is ActionKind.STAY_HOME:
            return Place.home(agent_id)
        return _public_place[self]


GOALS = tuple(GoalKind)
ACTIONS = tuple(ActionKind)

_action_index = dict((a, i) for i, a in enumerate(ACTIONS))
_destination = {
    ActionKind.STAY_HOME: PlaceKind.HOME,
    ActionKind.VISIT_PARK: PlaceKind.PARK,
    ActionKind.VISIT_CAFE: PlaceKind.CAFE,
    ActionKind.VISIT_CLINIC: PlaceKind.CLINIC,
}
_public_place = {
    ActionKind.VISIT_PARK: PARK,
    ActionKind.VISIT_CAFE: CAFE,
    ActionKind.VISIT_CLINIC: CLINIC,
}
_satisfies = {
    GoalKind.REST: ActionKind.STAY_HOME,
    GoalKind.HIKE: ActionKind.VISIT_PARK,
    GoalKind.SHOP: ActionKind.VISIT_CAFE,
    GoalKind.BE_VACCINATED: ActionKind.VISIT_CLINIC,
}


def goal_satisfied(goal, action):
    return _satisfies[goal] is action
